"""Mini-BEHAVIOR-style fetch task: carry an apple to a table in a grid room."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Any, Mapping, Optional

import numpy as np

from ..core import (
    INFEASIBLE,
    Action,
    AppleOnTable,
    DropAppleOnTable,
    EnvKind,
    Goal,
    MoveForward,
    PickUpApple,
    Turn,
    ValueEstimate,
)
from ..errors import GenerationExhausted, WrongEnvironmentAction
from .base import Cell, Environment, int_range

FACINGS = ("up", "left", "down", "right")
_DELTA = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1)}
# turn-left cycle taken from the worked example: left -> down -> right -> up -> left
TURN_LEFT = {"up": "left", "left": "down", "down": "right", "right": "up"}
TURN_RIGHT = {v: k for k, v in TURN_LEFT.items()}

ALPHABET: tuple[Action, ...] = (
    Turn("left"),
    Turn("right"),
    MoveForward(),
    PickUpApple(),
    DropAppleOnTable(),
)


@dataclass(frozen=True)
class FetchInstance:
    rows: int
    cols: int
    table_cells: frozenset[Cell]
    apple_start: Cell
    agent_start: Cell
    agent_facing: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "table_cells", frozenset(tuple(c) for c in self.table_cells))
        object.__setattr__(self, "apple_start", tuple(self.apple_start))
        object.__setattr__(self, "agent_start", tuple(self.agent_start))
        if not self.table_cells:
            raise ValueError("fetch instance needs at least one table cell")
        for c in (*self.table_cells, self.apple_start, self.agent_start):
            if not self.in_bounds(c):
                raise ValueError(f"cell {c} outside the {self.rows}x{self.cols} room")
        if self.apple_start in self.table_cells or self.agent_start in self.table_cells:
            raise ValueError("apple and agent must start off the table")
        if self.apple_start == self.agent_start:
            raise ValueError("agent cannot start on the apple")
        if self.agent_facing not in FACINGS:
            raise ValueError(f"bad facing {self.agent_facing!r}")

    def in_bounds(self, c: Cell) -> bool:
        return 0 <= c[0] < self.rows and 0 <= c[1] < self.cols

    def to_json(self) -> dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "table_cells": sorted(list(c) for c in self.table_cells),
            "apple_start": list(self.apple_start),
            "agent_start": list(self.agent_start),
            "agent_facing": self.agent_facing,
        }

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "FetchInstance":
        return cls(
            d["rows"],
            d["cols"],
            frozenset(tuple(c) for c in d["table_cells"]),
            tuple(d["apple_start"]),
            tuple(d["agent_start"]),
            d["agent_facing"],
        )


@dataclass(frozen=True)
class FetchObs:
    agent: Cell
    facing: str
    carrying: bool = False
    apple_cell: Optional[Cell] = None
    apple_on_table: bool = False
    apples: int = 1  # apples visible in the frame; 1 unless hallucinated

    def __post_init__(self) -> None:
        object.__setattr__(self, "agent", tuple(self.agent))
        if self.apple_cell is not None:
            object.__setattr__(self, "apple_cell", tuple(self.apple_cell))
        if (self.apple_cell is not None) + self.carrying + self.apple_on_table != 1:
            raise ValueError("apple must be on the floor, carried, or on the table")

    @property
    def ahead(self) -> Cell:
        dr, dc = _DELTA[self.facing]
        return (self.agent[0] + dr, self.agent[1] + dc)

    def key(self) -> str:
        where = (
            "carried" if self.carrying else "table" if self.apple_on_table else f"{self.apple_cell[0]},{self.apple_cell[1]}"
        )
        return f"fetch:{self.agent[0]},{self.agent[1]}:{self.facing}:{where}:a{self.apples}"

    def to_json(self) -> dict[str, Any]:
        return {
            "agent": list(self.agent),
            "facing": self.facing,
            "carrying": self.carrying,
            "apple_cell": None if self.apple_cell is None else list(self.apple_cell),
            "apple_on_table": self.apple_on_table,
            "apples": self.apples,
        }

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "FetchObs":
        cell = d.get("apple_cell")
        return cls(
            tuple(d["agent"]),
            d["facing"],
            d["carrying"],
            None if cell is None else tuple(cell),
            d["apple_on_table"],
            d.get("apples", 1),
        )


def initial_obs(inst: FetchInstance) -> FetchObs:
    return FetchObs(inst.agent_start, inst.agent_facing, apple_cell=inst.apple_start)


def fetch_step(inst: FetchInstance, obs: FetchObs, a: Action) -> FetchObs:
    """One ground-truth step; ineffective actions leave the observation unchanged."""
    if isinstance(a, Turn):
        table = TURN_LEFT if a.side == "left" else TURN_RIGHT
        return replace(obs, facing=table[obs.facing])
    if isinstance(a, MoveForward):
        ahead = obs.ahead
        if not inst.in_bounds(ahead) or ahead in inst.table_cells or ahead == obs.apple_cell:
            return obs
        return replace(obs, agent=ahead)
    if isinstance(a, PickUpApple):
        if obs.apple_cell is not None and obs.apple_cell == obs.ahead:
            return replace(obs, carrying=True, apple_cell=None)
        return obs
    if isinstance(a, DropAppleOnTable):
        if obs.carrying and obs.ahead in inst.table_cells:
            return replace(obs, carrying=False, apple_on_table=True)
        return obs
    raise WrongEnvironmentAction(f"{a!r} is not a fetch action")


@lru_cache(maxsize=65536)
def _solve(inst: FetchInstance, start: FetchObs) -> tuple[int, int]:
    """Breadth-first (total, pickup) over the joint state.

    Several shortest plans may pick the apple up at different steps; the split
    reported is the one with the shortest drop phase.
    """
    if start.apple_on_table:
        return 0, 0
    dist = {start: 0}
    picked: dict[FetchObs, Optional[int]] = {start: 0 if start.carrying else None}
    frontier = [start]
    depth = 0
    while frontier:
        nxt: list[FetchObs] = []
        for s in frontier:
            for a in ALPHABET:
                t = fetch_step(inst, s, a)
                if t == s:
                    continue
                p = picked[s]
                if p is None and t.carrying:
                    p = depth + 1
                if t not in dist:
                    dist[t] = depth + 1
                    picked[t] = p
                    nxt.append(t)
                elif dist[t] == depth + 1 and p is not None:
                    old = picked[t]
                    picked[t] = p if old is None else max(old, p)
        depth += 1
        done = [t for t in nxt if t.apple_on_table]
        if done:
            return depth, max(picked[t] for t in done)
        frontier = nxt
    return INFEASIBLE, INFEASIBLE


def fetch_value_oracle(inst: FetchInstance, obs: FetchObs) -> ValueEstimate:
    """Exact minimum action count, split into the pickup and drop phases."""
    total, pickup = _solve(inst, replace(obs, apples=1))
    if total >= INFEASIBLE:
        return ValueEstimate(INFEASIBLE)
    return ValueEstimate(total, {"pickup": pickup, "drop": total - pickup})


def _table_segment(rows: int, cols: int, length: int, rng: np.random.Generator) -> frozenset[Cell]:
    horizontal = bool(rng.integers(2))
    if horizontal and length <= cols:
        r = int(rng.integers(rows))
        c = int(rng.integers(cols - length + 1))
        return frozenset((r, c + i) for i in range(length))
    length = min(length, rows)
    r = int(rng.integers(rows - length + 1))
    c = int(rng.integers(cols))
    return frozenset((r + i, c) for i in range(length))


def random_fetch(params: Mapping[str, Any], rng: np.random.Generator, max_retries: int = 1000) -> FetchInstance:
    """Room with a straight table segment, apple and agent on free cells, redrawn until solvable."""
    rows_lo, rows_hi = int_range(params.get("rows", [5, 6]))
    cols_lo, cols_hi = int_range(params.get("cols", [rows_lo, rows_hi]))
    tab_lo, tab_hi = int_range(params.get("table_len", [1, 2]))
    for _ in range(max_retries):
        rows = int(rng.integers(rows_lo, rows_hi + 1))
        cols = int(rng.integers(cols_lo, cols_hi + 1))
        table = _table_segment(rows, cols, int(rng.integers(tab_lo, tab_hi + 1)), rng)
        free = [(r, c) for r in range(rows) for c in range(cols) if (r, c) not in table]
        if len(free) < 2:
            continue
        i, j = rng.choice(len(free), size=2, replace=False)
        facing = FACINGS[int(rng.integers(4))]
        inst = FetchInstance(rows, cols, table, free[int(i)], free[int(j)], facing)
        if fetch_value_oracle(inst, initial_obs(inst)).steps_remaining < INFEASIBLE:
            return inst
    raise GenerationExhausted(f"no solvable fetch room for {dict(params)} in {max_retries} draws")


class FetchEnv(Environment):
    kind = EnvKind.FETCH
    instance_type = FetchInstance
    obs_type = FetchObs

    def alphabet(self) -> list[Action]:
        return list(ALPHABET)

    def max_legal_actions(self) -> int:
        return len(ALPHABET)

    def legal_actions(self, inst, obs) -> list[Action]:
        return list(ALPHABET)

    def outcomes(self, inst, obs, a) -> list[FetchObs]:
        return [fetch_step(inst, obs, a)]

    def step(self, inst, obs, a, rng=None) -> FetchObs:
        return fetch_step(inst, obs, a)

    def goal_reached(self, inst, obs, goal: Goal) -> bool:
        return obs.apple_on_table

    def value(self, inst, obs, goal: Goal) -> ValueEstimate:
        return fetch_value_oracle(inst, obs)

    def initial_obs(self, inst) -> FetchObs:
        return initial_obs(inst)

    def goal(self, inst) -> Goal:
        return AppleOnTable()

    def random_instance(self, params, rng, max_retries=1000) -> FetchInstance:
        return random_fetch(params, rng, max_retries)

    def object_counts(self, obs) -> dict[str, int]:
        return {"agent": 1, "apple": obs.apples}
