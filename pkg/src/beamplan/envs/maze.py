"""FrozenLake-style maze: a character walks a grid to a gift while avoiding traps."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Mapping

import numpy as np

from ..core import (
    DIRECTIONS,
    INFEASIBLE,
    Action,
    EnvKind,
    Goal,
    MazeMove,
    ReachGift,
    ValueEstimate,
)
from ..errors import GenerationExhausted, SteppingFromTerminal, WrongEnvironmentAction
from .base import Cell, Environment, int_range

ALIVE, TRAPPED, AT_GOAL = "alive", "trapped", "at_goal"

_DELTA = {"left": (0, -1), "right": (0, 1), "up": (-1, 0), "down": (1, 0)}


@dataclass(frozen=True)
class MazeInstance:
    rows: int
    cols: int
    traps: frozenset[Cell]
    start: Cell
    gift: Cell

    def __post_init__(self) -> None:
        object.__setattr__(self, "traps", frozenset(tuple(t) for t in self.traps))
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "gift", tuple(self.gift))
        if self.rows < 1 or self.cols < 1:
            raise ValueError("maze dimensions must be positive")
        for c in (*self.traps, self.start, self.gift):
            if not self.in_bounds(c):
                raise ValueError(f"cell {c} outside {self.rows}x{self.cols} maze")
        if self.start == self.gift:
            raise ValueError("start and gift must differ")
        if self.start in self.traps or self.gift in self.traps:
            raise ValueError("start and gift must not be traps")

    def in_bounds(self, c: Cell) -> bool:
        return 0 <= c[0] < self.rows and 0 <= c[1] < self.cols

    def status_at(self, pos: Cell) -> str:
        if pos in self.traps:
            return TRAPPED
        if pos == self.gift:
            return AT_GOAL
        return ALIVE

    def to_json(self) -> dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "traps": sorted(list(t) for t in self.traps),
            "start": list(self.start),
            "gift": list(self.gift),
        }

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "MazeInstance":
        return cls(
            d["rows"],
            d["cols"],
            frozenset(tuple(t) for t in d["traps"]),
            tuple(d["start"]),
            tuple(d["gift"]),
        )


@dataclass(frozen=True)
class MazeObs:
    """Character pose plus how many gifts a (possibly hallucinated) frame shows."""

    pos: Cell
    status: str = ALIVE
    gifts: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "pos", tuple(self.pos))

    def key(self) -> str:
        return f"maze:{self.pos[0]},{self.pos[1]}:{self.status}:g{self.gifts}"

    def to_json(self) -> dict[str, Any]:
        return {"pos": list(self.pos), "status": self.status, "gifts": self.gifts}

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "MazeObs":
        return cls(tuple(d["pos"]), d["status"], d.get("gifts", 1))


def initial_obs(inst: MazeInstance) -> MazeObs:
    return MazeObs(inst.start, inst.status_at(inst.start))


def shifted(inst: MazeInstance, pos: Cell, direction: str) -> Cell:
    dr, dc = _DELTA[direction]
    nxt = (pos[0] + dr, pos[1] + dc)
    return nxt if inst.in_bounds(nxt) else pos


def maze_step(inst: MazeInstance, obs: MazeObs, a: Action) -> MazeObs:
    if not isinstance(a, MazeMove):
        raise WrongEnvironmentAction(f"{a!r} is not a maze action")
    if obs.status != ALIVE:
        raise SteppingFromTerminal(f"cannot move from a {obs.status} state")
    pos = shifted(inst, obs.pos, a.direction)
    return MazeObs(pos, inst.status_at(pos), obs.gifts)


@lru_cache(maxsize=4096)
def _distances_to_gift(inst: MazeInstance) -> dict[Cell, int]:
    dist = {inst.gift: 0}
    queue = deque([inst.gift])
    while queue:
        cur = queue.popleft()
        for d in DIRECTIONS:
            nxt = shifted(inst, cur, d)
            if nxt not in dist and nxt not in inst.traps:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return dist


def maze_value_oracle(inst: MazeInstance, obs: MazeObs) -> ValueEstimate:
    """Shortest trap-free path length to the gift; 100 when trapped or cut off."""
    if obs.pos in inst.traps:
        return ValueEstimate(INFEASIBLE)
    return ValueEstimate(_distances_to_gift(inst).get(obs.pos, INFEASIBLE))


def solvable(inst: MazeInstance) -> bool:
    return inst.start in _distances_to_gift(inst)


def random_maze(params: Mapping[str, Any], rng: np.random.Generator, max_retries: int = 1000) -> MazeInstance:
    """Uniform layout with the requested size and trap-count ranges, redrawn until solvable."""
    rows_lo, rows_hi = int_range(params.get("rows", [4, 6]))
    cols_lo, cols_hi = int_range(params.get("cols", [rows_lo, rows_hi]))
    traps_lo, traps_hi = int_range(params.get("traps", [2, 4]))
    for _ in range(max_retries):
        rows = int(rng.integers(rows_lo, rows_hi + 1))
        cols = int(rng.integers(cols_lo, cols_hi + 1))
        n_traps = int(rng.integers(traps_lo, traps_hi + 1))
        n_cells = rows * cols
        if n_traps + 2 > n_cells:
            continue
        picks = rng.choice(n_cells, size=n_traps + 2, replace=False)
        cells = [divmod(int(p), cols) for p in picks]
        inst = MazeInstance(rows, cols, frozenset(cells[2:]), cells[0], cells[1])
        if solvable(inst):
            return inst
    raise GenerationExhausted(f"no solvable maze for {dict(params)} in {max_retries} draws")


class MazeEnv(Environment):
    kind = EnvKind.MAZE
    instance_type = MazeInstance
    obs_type = MazeObs

    def alphabet(self) -> list[Action]:
        return [MazeMove(d) for d in DIRECTIONS]

    def max_legal_actions(self) -> int:
        return 4

    def legal_actions(self, inst, obs) -> list[Action]:
        return self.alphabet()

    def outcomes(self, inst, obs, a) -> list[MazeObs]:
        return [maze_step(inst, obs, a)]

    def step(self, inst, obs, a, rng=None) -> MazeObs:
        return maze_step(inst, obs, a)

    def is_terminal(self, inst, obs) -> bool:
        return obs.status != ALIVE

    def goal_reached(self, inst, obs, goal: Goal) -> bool:
        return obs.status == AT_GOAL

    def value(self, inst, obs, goal: Goal) -> ValueEstimate:
        return maze_value_oracle(inst, obs)

    def initial_obs(self, inst) -> MazeObs:
        return initial_obs(inst)

    def goal(self, inst) -> Goal:
        return ReachGift()

    def random_instance(self, params, rng, max_retries=1000) -> MazeInstance:
        return random_maze(params, rng, max_retries)

    def object_counts(self, obs) -> dict[str, int]:
        return {"character": 1, "gift": obs.gifts}
