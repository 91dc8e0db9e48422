"""Common environment interface used by the surrogate models, planner and harness."""

from __future__ import annotations

from typing import Any, Hashable, Mapping, Optional, Sequence

import numpy as np

from ..core import Action, EnvKind, Goal, ValueEstimate

Cell = tuple[int, int]


def int_range(spec: Any) -> tuple[int, int]:
    """Accept ``n`` or ``[lo, hi]`` (inclusive) from a params mapping."""
    if isinstance(spec, (int, np.integer)):
        return int(spec), int(spec)
    lo, hi = spec
    if lo > hi:
        raise ValueError(f"empty range {spec!r}")
    return int(lo), int(hi)


class Environment:
    """Ground-truth dynamics and oracles for one task.

    Observations and instances are frozen dataclasses, so every method is a
    pure function of its arguments plus the explicit ``rng``.
    """

    kind: EnvKind
    instance_type: type
    obs_type: type

    def alphabet(self) -> list[Action]:
        raise NotImplementedError

    def max_legal_actions(self) -> int:
        raise NotImplementedError

    def legal_actions(self, inst, obs) -> list[Action]:
        raise NotImplementedError

    def outcomes(self, inst, obs, a: Action) -> list:
        """Every next observation the true dynamics can produce."""
        raise NotImplementedError

    def first_outcome(self, inst, obs, a: Action):
        """A single representative of ``outcomes``, for exhaustive search."""
        return self.outcomes(inst, obs, a)[0]

    def step(self, inst, obs, a: Action, rng: Optional[np.random.Generator] = None):
        raise NotImplementedError

    def valid_next(self, inst, obs, a: Action, candidate) -> bool:
        try:
            return candidate in self.outcomes(inst, obs, a)
        except Exception:
            return False

    def is_terminal(self, inst, obs) -> bool:
        """True for absorbing states that cannot be stepped from."""
        return False

    def goal_reached(self, inst, obs, goal: Goal) -> bool:
        raise NotImplementedError

    def value(self, inst, obs, goal: Goal) -> ValueEstimate:
        raise NotImplementedError

    def initial_obs(self, inst):
        raise NotImplementedError

    def goal(self, inst) -> Goal:
        raise NotImplementedError

    def random_instance(self, params: Mapping[str, Any], rng: np.random.Generator, max_retries: int = 1000):
        raise NotImplementedError

    def object_counts(self, obs) -> dict[str, int]:
        raise NotImplementedError

    def search_key(self, obs) -> Hashable:
        """State identity for exhaustive search; details irrelevant to legality and goals may be dropped."""
        return obs

    def instance_to_json(self, inst) -> dict[str, Any]:
        return inst.to_json()

    def instance_from_json(self, d: Mapping[str, Any]):
        return self.instance_type.from_json(d)

    def obs_to_json(self, obs) -> dict[str, Any]:
        return obs.to_json()

    def obs_from_json(self, d: Mapping[str, Any]):
        return self.obs_type.from_json(d)
