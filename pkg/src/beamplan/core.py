"""Shared domain types: actions, goals, planner configuration, value estimates
and deterministic random-stream derivation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Union

import numpy as np

from .errors import InvalidConfig, ParseError


class EnvKind(str, Enum):
    MAZE = "frozenlake"
    FETCH = "minibehavior"
    TABLE = "languagetable"

    @classmethod
    def coerce(cls, value: Union[str, "EnvKind"]) -> "EnvKind":
        if isinstance(value, EnvKind):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "frozenlake": cls.MAZE,
            "maze": cls.MAZE,
            "minibehavior": cls.FETCH,
            "fetch": cls.FETCH,
            "languagetable": cls.TABLE,
            "table": cls.TABLE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown environment {value!r}") from None


DIRECTIONS = ("left", "down", "right", "up")
SIDES = ("left", "right")

BLOCKS = (
    "blue_moon",
    "blue_cube",
    "green_star",
    "green_cube",
    "yellow_star",
    "yellow_pentagon",
    "red_moon",
    "red_pentagon",
)
SLOTS = (
    "top_center",
    "top_left",
    "top_right",
    "center_left",
    "center_right",
    "bottom_center",
    "bottom_left",
    "bottom_right",
)

INFEASIBLE = 100


# ---------------------------------------------------------------------------
# Actions


@dataclass(frozen=True)
class MazeMove:
    direction: str

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"bad direction {self.direction!r}")


@dataclass(frozen=True)
class Turn:
    side: str

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"bad turn side {self.side!r}")


@dataclass(frozen=True)
class MoveForward:
    pass


@dataclass(frozen=True)
class PickUpApple:
    pass


@dataclass(frozen=True)
class DropAppleOnTable:
    pass


@dataclass(frozen=True)
class MoveBlockToBlock:
    src: str
    dst: str

    def __post_init__(self) -> None:
        if self.src not in BLOCKS or self.dst not in BLOCKS:
            raise ValueError(f"unknown block in {self}")


@dataclass(frozen=True)
class MoveBlockToPosition:
    src: str
    dst: str

    def __post_init__(self) -> None:
        if self.src not in BLOCKS or self.dst not in SLOTS:
            raise ValueError(f"unknown block or slot in {self}")


@dataclass(frozen=True)
class NoChange:
    """Inverse-model answer when the two observations are identical."""


@dataclass(frozen=True)
class Inexplicable:
    """Inverse-model answer when no single action explains the change."""


Action = Union[
    MazeMove,
    Turn,
    MoveForward,
    PickUpApple,
    DropAppleOnTable,
    MoveBlockToBlock,
    MoveBlockToPosition,
    NoChange,
    Inexplicable,
]

_ACTION_ENV = {
    MazeMove: EnvKind.MAZE,
    Turn: EnvKind.FETCH,
    MoveForward: EnvKind.FETCH,
    PickUpApple: EnvKind.FETCH,
    DropAppleOnTable: EnvKind.FETCH,
    MoveBlockToBlock: EnvKind.TABLE,
    MoveBlockToPosition: EnvKind.TABLE,
}


def action_env(a: Action) -> Optional[EnvKind]:
    """Environment an action belongs to; None for the inverse sentinels."""
    return _ACTION_ENV.get(type(a))


def normalize_action(a: Action) -> tuple[str, str, str]:
    """Canonical (verb, object, target) tuple used for semantic matching."""
    if isinstance(a, MazeMove):
        return ("go", a.direction, "")
    if isinstance(a, Turn):
        return ("turn", a.side, "")
    if isinstance(a, MoveForward):
        return ("move", "forward", "")
    if isinstance(a, PickUpApple):
        return ("pick_up", "apple", "")
    if isinstance(a, DropAppleOnTable):
        return ("drop", "apple", "table")
    if isinstance(a, (MoveBlockToBlock, MoveBlockToPosition)):
        return ("move", a.src, a.dst)
    if isinstance(a, NoChange):
        return ("none", "", "")
    if isinstance(a, Inexplicable):
        return ("inexplicable", "", "")
    raise TypeError(f"not an action: {a!r}")


def render_action(a: Action) -> str:
    """Canonical log rendering, e.g. ``move blue_moon to bottom_center``."""
    if isinstance(a, MazeMove):
        return f"go {a.direction}"
    if isinstance(a, Turn):
        return f"turn {a.side}"
    if isinstance(a, MoveForward):
        return "move forward"
    if isinstance(a, PickUpApple):
        return "pick up apple"
    if isinstance(a, DropAppleOnTable):
        return "drop apple on table"
    if isinstance(a, (MoveBlockToBlock, MoveBlockToPosition)):
        return f"move {a.src} to {a.dst}"
    if isinstance(a, NoChange):
        return "no change"
    if isinstance(a, Inexplicable):
        return "inexplicable"
    raise TypeError(f"not an action: {a!r}")


_ARTICLES = {"the", "a", "an"}
_FETCH_PHRASES = {
    "turn left": Turn("left"),
    "turn right": Turn("right"),
    "move forward": MoveForward(),
    "go forward": MoveForward(),
    "forward": MoveForward(),
    "pick up apple": PickUpApple(),
    "pick up": PickUpApple(),
    "pickup": PickUpApple(),
    "pickup apple": PickUpApple(),
    "drop apple on table": DropAppleOnTable(),
    "drop apple": DropAppleOnTable(),
    "drop": DropAppleOnTable(),
    "drop on table": DropAppleOnTable(),
}


def _clean(text: str) -> list[str]:
    s = text.strip().lower()
    s = re.sub(r"^\s*\d+\s*:\s*", "", s)  # "1: go down" as listed in the action menus
    s = s.replace("_", " ").replace("-", " ")
    s = re.sub(r"[^a-z0-9 ]", " ", s)
    return [w for w in s.split() if w not in _ARTICLES]


def _name(words: list[str], vocabulary: tuple[str, ...]) -> Optional[str]:
    ident = "_".join(words)
    return ident if ident in vocabulary else None


def parse_action(text: str, env_kind: Union[str, EnvKind]) -> Action:
    """Parse a textual action for one environment.

    Tolerates articles, case, punctuation and underscores-vs-spaces. Raises
    ParseError for anything outside the environment's alphabet.
    """
    kind = EnvKind.coerce(env_kind)
    words = _clean(text)
    phrase = " ".join(words)
    if kind is EnvKind.MAZE:
        m = re.fullmatch(r"(?:go |move )?(left|down|right|up)", phrase)
        if m:
            return MazeMove(m.group(1))
    elif kind is EnvKind.FETCH:
        if phrase in _FETCH_PHRASES:
            return _FETCH_PHRASES[phrase]
    else:
        if words and words[0] == "move" and "to" in words:
            i = words.index("to")
            src = _name(words[1:i], BLOCKS)
            rest = words[i + 1 :]
            if rest and rest[0] == "position":
                rest = rest[1:]
            if src is not None:
                dst_block = _name(rest, BLOCKS)
                if dst_block is not None:
                    return MoveBlockToBlock(src, dst_block)
                dst_slot = _name(rest, SLOTS)
                if dst_slot is not None:
                    return MoveBlockToPosition(src, dst_slot)
    raise ParseError(f"{text!r} is not a {kind.value} action")


# ---------------------------------------------------------------------------
# Goals


@dataclass(frozen=True)
class ReachGift:
    pass


@dataclass(frozen=True)
class AppleOnTable:
    pass


@dataclass(frozen=True)
class TargetConfig:
    """Goal slot for every block; stored as a sorted (block, slot) tuple."""

    assignment: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        blocks = [b for b, _ in self.assignment]
        slots = [s for _, s in self.assignment]
        if sorted(blocks) != sorted(BLOCKS):
            raise ValueError("target config must place each of the 8 blocks exactly once")
        if len(set(slots)) != len(slots) or not set(slots) <= set(SLOTS):
            raise ValueError("target config slots must be distinct known slots")
        object.__setattr__(self, "assignment", tuple(sorted(self.assignment)))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "TargetConfig":
        return cls(tuple(mapping.items()))

    def slot_of(self, block: str) -> str:
        return dict(self.assignment)[block]

    def as_dict(self) -> dict[str, str]:
        return dict(self.assignment)


Goal = Union[ReachGift, AppleOnTable, TargetConfig]


# ---------------------------------------------------------------------------
# Planner configuration and value estimates


@dataclass(frozen=True)
class PlannerConfig:
    beams: int
    action_branch: int
    dynamics_branch: int
    horizon: int
    dedupe: bool = False
    filtering_enabled: bool = True

    def validate(self, max_actions: Optional[int] = None) -> None:
        if self.beams < 1 or self.action_branch < 1 or self.dynamics_branch < 1:
            raise InvalidConfig("beams, action_branch and dynamics_branch must be >= 1")
        if self.horizon < 0:
            raise InvalidConfig("horizon must be non-negative")
        if max_actions is not None and self.action_branch > max_actions:
            raise InvalidConfig(
                f"action_branch {self.action_branch} exceeds the {max_actions} legal actions"
            )


@dataclass(frozen=True)
class ValueEstimate:
    steps_remaining: float
    components: Optional[Mapping[str, float]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.steps_remaining < 0:
            raise ValueError("steps_remaining must be non-negative")

    @property
    def infeasible(self) -> bool:
        return self.steps_remaining >= INFEASIBLE


# ---------------------------------------------------------------------------
# Random streams

ROLES = ("policy", "forward", "inverse", "value", "env", "instance")


@dataclass(frozen=True)
class RngStreamKey:
    master_seed: int
    episode_index: int
    role: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown stream role {self.role!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if self.episode_index < 0:
            raise ValueError("episode_index must be non-negative")


def derive_stream(key: RngStreamKey) -> np.random.Generator:
    """Independent, reproducible generator for one (seed, episode, role)."""
    seq = np.random.SeedSequence(
        entropy=key.master_seed,
        spawn_key=(key.episode_index, ROLES.index(key.role)),
    )
    return np.random.Generator(np.random.PCG64(seq))


@dataclass
class RoleStreams:
    """The per-episode generators each planning role draws from."""

    policy: np.random.Generator
    forward: np.random.Generator
    inverse: np.random.Generator
    value: np.random.Generator
    env: np.random.Generator

    @classmethod
    def for_episode(cls, master_seed: int, episode_index: int) -> "RoleStreams":
        def mk(role: str) -> np.random.Generator:
            return derive_stream(RngStreamKey(master_seed, episode_index, role))

        return cls(mk("policy"), mk("forward"), mk("inverse"), mk("value"), mk("env"))
