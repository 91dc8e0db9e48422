"""Language-Table-style block rearrangement over eight named table slots.

A block placed with "move block to position" becomes the slot's anchor. A
block moved onto another block lands in that block's slot at one of four
compass offsets around it; the offset is the stochastic part of the dynamics
and ``around`` records which block it was placed next to.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional

import numpy as np

from ..core import (
    BLOCKS,
    SLOTS,
    Action,
    EnvKind,
    Goal,
    MoveBlockToBlock,
    MoveBlockToPosition,
    TargetConfig,
    ValueEstimate,
)
from ..errors import DestinationOccupied, GenerationExhausted, SelfMove, WrongEnvironmentAction
from .base import Environment, int_range

ANCHOR = "anchor"
OFFSETS = ("north", "east", "south", "west")
VALUE_CAP = 10


@dataclass(frozen=True, order=True)
class BlockPlacement:
    block: str
    slot: str
    offset: str = ANCHOR
    around: Optional[str] = None

    def to_json(self) -> dict[str, Any]:
        return {"block": self.block, "slot": self.slot, "offset": self.offset, "around": self.around}


def _order(p: BlockPlacement) -> tuple[str, str, str, str]:
    # same order as the dataclass comparison, without its per-call overhead
    return (p.block, p.slot, p.offset, p.around or "")


@dataclass(frozen=True)
class TableObs:
    """Multiset of block placements.

    A ground-truth observation holds each of the eight blocks exactly once;
    hallucinated predictions may drop or repeat one.
    """

    placement: tuple[BlockPlacement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "placement", tuple(sorted(self.placement, key=_order)))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "TableObs":
        """Build from ``{block: slot}`` or ``{block: (slot, offset[, around])}``."""
        out = []
        for block, spec in mapping.items():
            if isinstance(spec, str):
                spec = (spec,)
            out.append(BlockPlacement(block, *spec))
        obs = cls(tuple(out))
        obs.check()
        return obs

    @classmethod
    def from_slot_lists(cls, config: Mapping[str, Iterable[str]]) -> "TableObs":
        """Build from ``{slot: [block, ...]}``; the first block anchors the slot."""
        out = []
        for slot, blocks in config.items():
            blocks = list(blocks)
            for i, b in enumerate(blocks):
                if i == 0:
                    out.append(BlockPlacement(b, slot))
                else:
                    out.append(BlockPlacement(b, slot, OFFSETS[(i - 1) % 4], blocks[0]))
        obs = cls(tuple(out))
        obs.check()
        return obs

    def check(self) -> None:
        if not self.intact:
            raise ValueError("every block must be placed exactly once")
        anchors = Counter(p.slot for p in self.placement if p.offset == ANCHOR)
        if any(n > 1 for n in anchors.values()):
            raise ValueError("a slot may hold at most one anchored block")
        for p in self.placement:
            if p.slot not in SLOTS or (p.offset != ANCHOR and p.offset not in OFFSETS):
                raise ValueError(f"bad placement {p}")

    @property
    def intact(self) -> bool:
        return sorted(p.block for p in self.placement) == sorted(BLOCKS)

    @cached_property
    def _by_block(self) -> dict[str, BlockPlacement]:
        return {p.block: p for p in self.placement}

    def where(self, block: str) -> Optional[BlockPlacement]:
        return self._by_block.get(block)

    def present_blocks(self) -> list[str]:
        here = {p.block for p in self.placement}
        return [b for b in BLOCKS if b in here]

    def blocks_in(self, slot: str) -> list[str]:
        return [p.block for p in self.placement if p.slot == slot]

    def empty_slots(self) -> list[str]:
        used = {p.slot for p in self.placement}
        return [s for s in SLOTS if s not in used]

    def slot_config(self) -> dict[str, list[str]]:
        cfg: dict[str, list[str]] = {s: [] for s in SLOTS}
        for p in self.placement:
            cfg[p.slot].append(p.block)
        return cfg

    def relocated(self, block: str, new: BlockPlacement) -> "TableObs":
        rest = tuple(p for p in self.placement if p.block != block)
        return TableObs(rest + (new,))

    def key(self) -> str:
        parts = [f"{p.block}@{p.slot}/{p.offset}" + (f"~{p.around}" if p.around else "") for p in self.placement]
        return "table:" + ";".join(parts)

    def to_json(self) -> dict[str, Any]:
        return {"placement": [p.to_json() for p in self.placement]}

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "TableObs":
        return cls(
            tuple(BlockPlacement(p["block"], p["slot"], p.get("offset", ANCHOR), p.get("around")) for p in d["placement"])
        )


@dataclass(frozen=True)
class TableInstance:
    initial: TableObs
    goal: TargetConfig

    def to_json(self) -> dict[str, Any]:
        return {"initial": self.initial.to_json(), "goal": self.goal.as_dict()}

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "TableInstance":
        return cls(TableObs.from_json(d["initial"]), TargetConfig.from_mapping(d["goal"]))


def _target(obs: TableObs, a: Action) -> tuple[str, list[BlockPlacement]]:
    """Source block and every placement the action can give it."""
    if isinstance(a, MoveBlockToPosition):
        if obs.where(a.src) is None:
            raise ValueError(f"{a.src} is not on the table")
        if obs.blocks_in(a.dst):
            raise DestinationOccupied(f"{a.dst} holds {obs.blocks_in(a.dst)}")
        return a.src, [BlockPlacement(a.src, a.dst)]
    if isinstance(a, MoveBlockToBlock):
        if a.src == a.dst:
            raise SelfMove(f"cannot move {a.src} onto itself")
        if obs.where(a.src) is None:
            raise ValueError(f"{a.src} is not on the table")
        target = obs.where(a.dst)
        if target is None:
            raise ValueError(f"{a.dst} is not on the table")
        return a.src, [BlockPlacement(a.src, target.slot, off, a.dst) for off in OFFSETS]
    raise WrongEnvironmentAction(f"{a!r} is not a table action")


def table_outcomes(obs: TableObs, a: Action) -> list[TableObs]:
    src, options = _target(obs, a)
    return [obs.relocated(src, p) for p in options]


def table_step(obs: TableObs, a: Action, rng: np.random.Generator) -> TableObs:
    """Apply one move; block-to-block offsets are drawn uniformly from ``rng``."""
    src, options = _target(obs, a)
    pick = options[int(rng.integers(len(options)))] if len(options) > 1 else options[0]
    return obs.relocated(src, pick)


def table_valid_next(obs: TableObs, a: Action, candidate: TableObs) -> bool:
    if not candidate.intact:
        return False
    try:
        return candidate in table_outcomes(obs, a)
    except (ValueError, WrongEnvironmentAction):
        return False


def table_value_oracle(obs: TableObs, goal: TargetConfig) -> ValueEstimate:
    """Visible placements outside their goal slot, capped at 10."""
    want = goal.as_dict()
    misplaced = sum(1 for p in obs.placement if p.slot != want[p.block])
    return ValueEstimate(min(misplaced, VALUE_CAP))


def table_goal_reached(obs: TableObs, goal: TargetConfig) -> bool:
    if not obs.intact:
        return False
    want = goal.as_dict()
    return all(p.slot == want[p.block] for p in obs.placement)


def table_legal_actions(obs: TableObs) -> list[Action]:
    present = obs.present_blocks()
    acts: list[Action] = [MoveBlockToBlock(s, d) for s in present for d in present if s != d]
    empty = obs.empty_slots()
    acts.extend(MoveBlockToPosition(s, slot) for s in present for slot in empty)
    return acts


def random_table(params: Mapping[str, Any], rng: np.random.Generator, max_retries: int = 1000) -> TableInstance:
    """Random goal permutation; ``misplaced`` blocks are scattered to other slots,
    stacking next to whatever already occupies the chosen slot."""
    lo, hi = int_range(params.get("misplaced", [3, 6]))
    if not 0 <= lo <= hi <= len(BLOCKS):
        raise GenerationExhausted(f"cannot misplace {lo}..{hi} of {len(BLOCKS)} blocks")
    for _ in range(max_retries):
        slots = [SLOTS[int(i)] for i in rng.permutation(len(SLOTS))]
        goal = TargetConfig(tuple(zip(BLOCKS, slots)))
        want = goal.as_dict()
        k = int(rng.integers(lo, hi + 1))
        moved = [BLOCKS[int(i)] for i in rng.choice(len(BLOCKS), size=k, replace=False)]
        placed = [BlockPlacement(b, want[b]) for b in BLOCKS if b not in moved]
        for b in moved:
            choices = [s for s in SLOTS if s != want[b]]
            slot = choices[int(rng.integers(len(choices)))]
            here = [p.block for p in placed if p.slot == slot]
            if here:
                host = here[int(rng.integers(len(here)))]
                placed.append(BlockPlacement(b, slot, OFFSETS[int(rng.integers(4))], host))
            else:
                placed.append(BlockPlacement(b, slot))
        obs = TableObs(tuple(placed))
        obs.check()
        if table_value_oracle(obs, goal).steps_remaining == k:
            return TableInstance(obs, goal)
    raise GenerationExhausted(f"no table instance for {dict(params)} in {max_retries} draws")


class TableEnv(Environment):
    kind = EnvKind.TABLE
    instance_type = TableInstance
    obs_type = TableObs

    def alphabet(self) -> list[Action]:
        acts: list[Action] = [MoveBlockToBlock(s, d) for s in BLOCKS for d in BLOCKS if s != d]
        acts.extend(MoveBlockToPosition(s, slot) for s in BLOCKS for slot in SLOTS)
        return acts

    def max_legal_actions(self) -> int:
        # eight blocks always cover at least one slot
        return len(BLOCKS) * (len(BLOCKS) - 1) + len(BLOCKS) * (len(SLOTS) - 1)

    def legal_actions(self, inst, obs) -> list[Action]:
        return table_legal_actions(obs)

    def outcomes(self, inst, obs, a) -> list[TableObs]:
        return table_outcomes(obs, a)

    def first_outcome(self, inst, obs, a) -> TableObs:
        src, options = _target(obs, a)
        return obs.relocated(src, options[0])

    def step(self, inst, obs, a, rng=None) -> TableObs:
        if rng is None:
            raise ValueError("table dynamics are stochastic; pass an rng")
        return table_step(obs, a, rng)

    def valid_next(self, inst, obs, a, candidate) -> bool:
        return table_valid_next(obs, a, candidate)

    def goal_reached(self, inst, obs, goal: Goal) -> bool:
        return table_goal_reached(obs, goal)

    def value(self, inst, obs, goal: Goal) -> ValueEstimate:
        return table_value_oracle(obs, goal)

    def initial_obs(self, inst) -> TableObs:
        return inst.initial

    def goal(self, inst) -> Goal:
        return inst.goal

    def random_instance(self, params, rng, max_retries=1000) -> TableInstance:
        return random_table(params, rng, max_retries)

    def object_counts(self, obs) -> dict[str, int]:
        counts = Counter(p.block for p in obs.placement)
        return {b: counts.get(b, 0) for b in BLOCKS}

    def search_key(self, obs):
        # placements are already ordered by (block, slot)
        return tuple((p.block, p.slot) for p in obs.placement)
