"""Noisy stand-ins for the four model roles used by the planner.

Each role wraps the ground-truth environment and corrupts it according to a
``NoiseProfile``. With every noise parameter at zero the roles reduce to the
exact oracles.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Any, Mapping, Optional, Union

import numpy as np

from .core import (
    INFEASIBLE,
    Action,
    EnvKind,
    Goal,
    Inexplicable,
    MoveBlockToBlock,
    MoveBlockToPosition,
    NoChange,
    ValueEstimate,
    normalize_action,
)
from .envs import get_env
from .envs.base import Environment
from .envs.fetch import FACINGS, FetchObs
from .envs.fetch import _DELTA as FETCH_DELTA
from .envs.maze import DIRECTIONS, MazeObs, shifted
from .envs.table import ANCHOR, OFFSETS, BlockPlacement, TableObs
from .errors import InsufficientActions

CATEGORIES = ("valid", "wrong_effect", "delete", "duplicate")

EnvLike = Union[str, EnvKind, Environment]


def _env(kind: EnvLike) -> Environment:
    return kind if isinstance(kind, Environment) else get_env(kind)


@dataclass(frozen=True)
class ValueNoise:
    """With probability ``p`` shift the value by a uniform +-1..+-k."""

    k: int
    p: float

    def __post_init__(self) -> None:
        if self.k < 1 or not 0.0 <= self.p <= 1.0:
            raise ValueError(f"bad value noise {self}")


@dataclass(frozen=True)
class NoiseProfile:
    p_wrong_effect: float = 0.0
    p_delete: float = 0.0
    p_duplicate: float = 0.0
    q_inverse: float = 1.0
    value_noise: Optional[ValueNoise] = None
    counter_error: float = 0.0

    def __post_init__(self) -> None:
        probs = (self.p_wrong_effect, self.p_delete, self.p_duplicate, self.q_inverse, self.counter_error)
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("noise probabilities must lie in [0, 1]")
        if self.p_wrong_effect + self.p_delete + self.p_duplicate > 1.0 + 1e-12:
            raise ValueError("forward error probabilities sum above 1")

    @property
    def p_valid(self) -> float:
        return max(0.0, 1.0 - self.p_wrong_effect - self.p_delete - self.p_duplicate)

    def to_json(self) -> dict[str, Any]:
        d = asdict(self)
        d["value_noise"] = None if self.value_noise is None else asdict(self.value_noise)
        return d

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "NoiseProfile":
        d = dict(d)
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown noise fields {sorted(unknown)}")
        vn = d.get("value_noise")
        if vn is not None and not isinstance(vn, ValueNoise):
            d["value_noise"] = ValueNoise(int(vn["k"]), float(vn["p"]))
        return cls(**d)


@dataclass(frozen=True)
class PolicyParams:
    epsilon: float = 0.05
    temperature: float = 0.25

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")

    def to_json(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "PolicyParams":
        unknown = set(d) - {"epsilon", "temperature"}
        if unknown:
            raise ValueError(f"unknown policy fields {sorted(unknown)}")
        return cls(**d)


ORACLE_NOISE = NoiseProfile()
GREEDY_POLICY = PolicyParams(epsilon=0.0, temperature=1e-6)


# ---------------------------------------------------------------------------
# Forward dynamics


def _pick(items: list, rng: np.random.Generator):
    return items[int(rng.integers(len(items)))]


def _maze_wrong(env, inst, obs: MazeObs, a: Action, truth: list, rng) -> MazeObs:
    options = []
    for d in DIRECTIONS:
        pos = shifted(inst, obs.pos, d)
        cand = MazeObs(pos, inst.status_at(pos), obs.gifts)
        if cand not in truth and cand not in options:
            options.append(cand)
    if not options:
        true_pos = truth[0].pos
        for d in DIRECTIONS:
            pos = shifted(inst, true_pos, d)
            cand = MazeObs(pos, inst.status_at(pos), obs.gifts)
            if cand not in truth and cand not in options:
                options.append(cand)
    return _pick(options, rng)


def _fetch_wrong(env, inst, obs: FetchObs, a: Action, truth: list, rng) -> FetchObs:
    base = truth[0]
    options: list[FetchObs] = []

    def add(cand: FetchObs) -> None:
        if cand in truth or cand in options:
            return
        if not inst.in_bounds(cand.agent) or cand.agent in inst.table_cells or cand.agent == cand.apple_cell:
            return
        options.append(cand)

    for b in env.alphabet():
        add(env.step(inst, obs, b))
    for dr, dc in FETCH_DELTA.values():
        add(replace(base, agent=(base.agent[0] + dr, base.agent[1] + dc)))
    for f in FACINGS:
        add(replace(base, facing=f))
    if base.apple_cell is not None:
        add(replace(base, apple_cell=None, carrying=True))
    elif base.carrying:
        add(replace(base, carrying=False, apple_on_table=True))
    else:
        add(replace(base, apple_on_table=False, carrying=True))
    options.sort(key=lambda o: o.key())
    return _pick(options, rng)


def _table_wrong(env, inst, obs: TableObs, a: Action, truth: list, rng) -> TableObs:
    # Moving any block other than src, or moving src to a slot other than the
    # intended one, can never land in the valid-outcome set.
    options: dict[TableObs, None] = {}

    def add(cand: TableObs) -> None:
        if cand != obs:
            options[cand] = None

    src = a.src
    if isinstance(a, MoveBlockToBlock):
        intended = obs.where(a.dst).slot
        landings = [BlockPlacement("", intended, off, a.dst) for off in OFFSETS]
    else:
        intended = a.dst
        landings = [BlockPlacement("", intended)]
    # wrong source block
    for w in obs.present_blocks():
        if w in (src, getattr(a, "dst", None)):
            continue
        for p in landings:
            add(obs.relocated(w, replace(p, block=w)))
    # wrong destination slot
    current = obs.where(src).slot
    for slot in obs.slot_config():
        if slot in (intended, current):
            continue
        hosts = [b for b in obs.blocks_in(slot) if b != src]
        if not hosts:
            add(obs.relocated(src, BlockPlacement(src, slot)))
        for h in hosts:
            for off in OFFSETS:
                add(obs.relocated(src, BlockPlacement(src, slot, off, h)))
    return _pick(list(options), rng)


def _remove_object(env, obs, rng):
    if isinstance(obs, MazeObs):
        return replace(obs, gifts=max(0, obs.gifts - 1))
    if isinstance(obs, FetchObs):
        return replace(obs, apples=max(0, obs.apples - 1))
    victim = _pick(list(obs.placement), rng)
    rest = list(obs.placement)
    rest.remove(victim)
    return TableObs(tuple(rest))


def _clone_object(env, obs, rng):
    if isinstance(obs, MazeObs):
        return replace(obs, gifts=obs.gifts + 1)
    if isinstance(obs, FetchObs):
        return replace(obs, apples=obs.apples + 1)
    original = _pick(list(obs.placement), rng)
    slot = _pick([s for s in obs.slot_config() if s != original.slot], rng)
    hosts = obs.blocks_in(slot)
    if hosts:
        clone = BlockPlacement(original.block, slot, _pick(list(OFFSETS), rng), _pick(hosts, rng))
    else:
        clone = BlockPlacement(original.block, slot)
    return TableObs(obs.placement + (clone,))


_WRONG = {EnvKind.MAZE: _maze_wrong, EnvKind.FETCH: _fetch_wrong, EnvKind.TABLE: _table_wrong}


def draw_category(noise: NoiseProfile, rng: np.random.Generator) -> str:
    u = rng.random()
    edges = np.cumsum([noise.p_wrong_effect, noise.p_delete, noise.p_duplicate])
    if u < edges[0]:
        return "wrong_effect"
    if u < edges[1]:
        return "delete"
    if u < edges[2]:
        return "duplicate"
    return "valid"


def sample_prediction(env_kind: EnvLike, instance, obs, a: Action, noise: NoiseProfile, rng: np.random.Generator):
    """One forward-model draw, returned with the error category that produced it."""
    env = _env(env_kind)
    category = draw_category(noise, rng)
    truth = env.outcomes(instance, obs, a)
    if category == "wrong_effect":
        return category, _WRONG[env.kind](env, instance, obs, a, truth, rng)
    sample = _pick(truth, rng) if len(truth) > 1 else truth[0]
    if category == "delete":
        return category, _remove_object(env, sample, rng)
    if category == "duplicate":
        return category, _clone_object(env, sample, rng)
    return category, sample


def forward_predict(env_kind: EnvLike, instance, obs, a: Action, noise: NoiseProfile, rng: np.random.Generator):
    return sample_prediction(env_kind, instance, obs, a, noise, rng)[1]


# ---------------------------------------------------------------------------
# Inverse dynamics


def explain_transition(env_kind: EnvLike, instance, obs, next_obs) -> Action:
    """The single action whose true effect turns ``obs`` into ``next_obs``.

    NoChange for identical observations, Inexplicable when no single action
    (or more than one) accounts for the difference.
    """
    env = _env(env_kind)
    if next_obs == obs:
        return NoChange()
    if env.is_terminal(instance, obs):
        return Inexplicable()
    if env.kind is EnvKind.TABLE:
        return _explain_table(env, instance, obs, next_obs)
    found = [b for b in env.alphabet() if env.step(instance, obs, b) == next_obs]
    return found[0] if len(found) == 1 else Inexplicable()


def _explain_table(env, instance, obs: TableObs, nxt: TableObs) -> Action:
    if env.object_counts(obs) != env.object_counts(nxt):
        return Inexplicable()
    changed = {p.block for p in set(obs.placement) ^ set(nxt.placement)}
    if len(changed) != 1:
        return Inexplicable()
    (block,) = changed
    landed = nxt.where(block)
    if landed.offset == ANCHOR:
        guess: Action = MoveBlockToPosition(block, landed.slot)
    elif landed.around is not None and landed.around != block:
        guess = MoveBlockToBlock(block, landed.around)
    else:
        return Inexplicable()
    try:
        ok = nxt in env.outcomes(instance, obs, guess)
    except ValueError:
        ok = False
    return guess if ok else Inexplicable()


def inverse_infer(env_kind: EnvLike, instance, obs, next_obs, noise: NoiseProfile, rng: np.random.Generator) -> Action:
    env = _env(env_kind)
    truth = explain_transition(env, instance, obs, next_obs)
    if rng.random() < noise.q_inverse:
        return truth
    key = normalize_action(truth)
    wrong = [b for b in env.alphabet() if normalize_action(b) != key]
    return _pick(wrong, rng)


# ---------------------------------------------------------------------------
# Policy and value


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max()
    w = np.exp(z)
    return w / w.sum()


def propose_actions(
    env_kind: EnvLike,
    instance,
    obs,
    goal: Goal,
    A: int,
    params: PolicyParams,
    rng: np.random.Generator,
) -> list[Action]:
    """A distinct legal actions; each pick is uniform with probability epsilon,
    otherwise softmax over the negated oracle value change."""
    env = _env(env_kind)
    legal = env.legal_actions(instance, obs)
    if A > len(legal):
        raise InsufficientActions(f"asked for {A} proposals, only {len(legal)} legal actions")
    here = env.value(instance, obs, goal).steps_remaining
    deltas = np.array(
        [env.value(instance, env.outcomes(instance, obs, b)[0], goal).steps_remaining - here for b in legal],
        dtype=float,
    )
    remaining = list(range(len(legal)))
    chosen: list[Action] = []
    for _ in range(A):
        explore = rng.random() < params.epsilon
        if explore:
            j = int(rng.integers(len(remaining)))
        else:
            probs = _softmax(-deltas[remaining] / params.temperature)
            j = int(rng.choice(len(remaining), p=probs))
        chosen.append(legal[remaining.pop(j)])
    return chosen


def estimate_value(env_kind: EnvLike, instance, obs, goal: Goal, noise: NoiseProfile, rng: np.random.Generator) -> ValueEstimate:
    env = _env(env_kind)
    exact = env.value(instance, obs, goal)
    vn = noise.value_noise
    if vn is None:
        return exact
    if rng.random() >= vn.p or exact.steps_remaining >= INFEASIBLE:
        return exact
    shift = int(rng.integers(1, vn.k + 1)) * (1 if rng.random() < 0.5 else -1)
    noisy = min(max(exact.steps_remaining + shift, 0), INFEASIBLE - 1)
    return ValueEstimate(noisy)


def count_objects(env_kind: EnvLike, obs, noise: NoiseProfile, rng: np.random.Generator) -> dict[str, int]:
    counts = _env(env_kind).object_counts(obs)
    if noise.counter_error <= 0:
        return counts
    for cat in sorted(counts):
        if rng.random() < noise.counter_error:
            counts[cat] = max(0, counts[cat] + (1 if rng.random() < 0.5 else -1))
    return counts


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurrogateModels:
    """Bundle of the four roles (plus the object counter) the planner calls.

    Any object exposing the same five methods can be handed to the planner.
    """

    noise: NoiseProfile = field(default_factory=NoiseProfile)
    policy_params: PolicyParams = field(default_factory=PolicyParams)

    def propose(self, env, instance, obs, goal, A, rng) -> list[Action]:
        return propose_actions(env, instance, obs, goal, A, self.policy_params, rng)

    def forward(self, env, instance, obs, a, rng):
        return forward_predict(env, instance, obs, a, self.noise, rng)

    def sample(self, env, instance, obs, a, rng):
        return sample_prediction(env, instance, obs, a, self.noise, rng)

    def inverse(self, env, instance, obs, next_obs, rng) -> Action:
        return inverse_infer(env, instance, obs, next_obs, self.noise, rng)

    def value(self, env, instance, obs, goal, rng) -> ValueEstimate:
        return estimate_value(env, instance, obs, goal, self.noise, rng)

    def count(self, env, obs, rng) -> dict[str, int]:
        return count_objects(env, obs, self.noise, rng)


def oracle_models() -> SurrogateModels:
    return SurrogateModels(ORACLE_NOISE, GREEDY_POLICY)
