"""Exception types raised across the package."""

from __future__ import annotations


class BeamplanError(Exception):
    """Base class for all package errors."""


class ParseError(BeamplanError, ValueError):
    """Text does not match any action of the requested environment."""


class WrongEnvironmentAction(BeamplanError, ValueError):
    """An action was applied to an environment it does not belong to."""


class SteppingFromTerminal(BeamplanError, RuntimeError):
    """A step was requested from an absorbing (trapped / at-goal) state."""


class DestinationOccupied(BeamplanError, ValueError):
    """A block was moved to a table slot that already holds blocks."""


class SelfMove(BeamplanError, ValueError):
    """A block was asked to move onto itself."""


class GenerationExhausted(BeamplanError, RuntimeError):
    """No valid instance could be sampled within the retry limit."""


class InsufficientActions(BeamplanError, ValueError):
    """More distinct proposals were requested than legal actions exist."""


class InvalidConfig(BeamplanError, ValueError):
    """Planner or experiment configuration is malformed."""


class TreeTooLarge(BeamplanError, RuntimeError):
    """Exhaustive search exceeded its node budget."""
