"""Beam search over surrogate-model rollouts, plus an exhaustive reference planner."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Optional

from .core import INFEASIBLE, Action, PlannerConfig, RoleStreams, render_action
from .errors import TreeTooLarge
from .filtering import REJECT_REASONS, TransitionCandidate, discriminate
from .surrogate import EnvLike, _env

COMPLETE = "complete"
HORIZON_EXHAUSTED = "horizon_exhausted"
NO_VALID_TRANSITIONS = "no_valid_transitions"


@dataclass(frozen=True)
class BeamEntry:
    obs: Any
    actions: tuple[Action, ...]
    score: float  # negated steps-remaining estimate; higher is better
    terminal: bool
    trajectory: tuple[Any, ...] = ()  # predicted observation after each action


@dataclass
class PlanStats:
    proposed: int = 0
    accepted: int = 0
    rejected_by_reason: dict[str, int] = field(default_factory=lambda: {r: 0 for r in REJECT_REASONS})
    beams_expanded: int = 0
    steps: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "proposed": self.proposed,
            "accepted": self.accepted,
            "rejected_by_reason": dict(self.rejected_by_reason),
            "beams_expanded": self.beams_expanded,
            "steps": self.steps,
        }


@dataclass(frozen=True)
class StepTrace:
    """Scores of one step's candidate pool and which indices were retained."""

    step: int
    pool_scores: tuple[float, ...]
    kept: tuple[int, ...]


@dataclass
class PlanResult:
    actions: tuple[Action, ...]
    predicted_obs: tuple[Any, ...]
    score: float
    status: str
    stats: PlanStats = field(default_factory=PlanStats)
    candidates: list[tuple[int, TransitionCandidate]] = field(default_factory=list)
    trace: list[StepTrace] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "actions": [render_action(a) for a in self.actions],
            "predicted_obs": [o.to_json() for o in self.predicted_obs],
            "score": self.score,
            "status": self.status,
            "stats": self.stats.to_json(),
        }


def select_top_b(candidates: list[BeamEntry], B: int) -> list[BeamEntry]:
    """Highest scores first; ties keep insertion order, then compare action text."""
    ranked = sorted(
        enumerate(candidates),
        key=lambda t: (-t[1].score, t[0], [render_action(a) for a in t[1].actions]),
    )
    return [c for _, c in ranked[:B]]


def _rank(pool: list[BeamEntry], B: int) -> list[int]:
    order = sorted(range(len(pool)), key=lambda i: (-pool[i].score, i))
    return order[:B]


def plan(
    env_kind: EnvLike,
    instance,
    o0,
    goal,
    models,
    cfg: PlannerConfig,
    streams: RoleStreams,
) -> PlanResult:
    """Beam search with filtered dynamics rollouts.

    ``models`` supplies ``propose``, ``forward`` (or ``sample``), ``inverse``,
    ``value`` and ``count``; see :class:`beamplan.surrogate.SurrogateModels`.
    """
    env = _env(env_kind)
    cfg.validate(len(env.alphabet()))
    stats = PlanStats()
    log: list[tuple[int, TransitionCandidate]] = []
    trace: list[StepTrace] = []

    v0 = models.value(env, instance, o0, goal, streams.value).steps_remaining
    beams = [BeamEntry(o0, (), -v0, v0 == 0)] * cfg.beams
    status: Optional[str] = None

    for h in range(cfg.horizon):
        pool: list[BeamEntry] = []
        for beam in beams:
            if beam.terminal or env.is_terminal(instance, beam.obs):
                pool.append(beam)
                continue
            stats.beams_expanded += 1
            n_legal = len(env.legal_actions(instance, beam.obs))
            proposals = models.propose(env, instance, beam.obs, goal, min(cfg.action_branch, n_legal), streams.policy)
            for a in proposals:
                cands = discriminate(
                    env,
                    instance,
                    beam.obs,
                    a,
                    cfg.dynamics_branch,
                    models,
                    streams.forward,
                    streams.inverse,
                    cfg.filtering_enabled,
                )
                for c in cands:
                    log.append((h, c))
                    stats.proposed += 1
                    if not c.accepted:
                        stats.rejected_by_reason[c.reject_reason] += 1
                        continue
                    stats.accepted += 1
                    v = models.value(env, instance, c.predicted, goal, streams.value).steps_remaining
                    pool.append(
                        BeamEntry(c.predicted, beam.actions + (a,), -v, v == 0, beam.trajectory + (c.predicted,))
                    )
        if cfg.dedupe:
            seen: set = set()
            unique = []
            for e in pool:
                k = (e.obs.key(), tuple(render_action(a) for a in e.actions))
                if k not in seen:
                    seen.add(k)
                    unique.append(e)
            pool = unique
        stats.steps += 1
        if not pool:
            status = NO_VALID_TRANSITIONS
            break
        kept = _rank(pool, cfg.beams)
        trace.append(StepTrace(h, tuple(e.score for e in pool), tuple(kept)))
        beams = [pool[i] for i in kept]

    best = select_top_b(beams, 1)[0]
    if status is None:
        status = COMPLETE if best.terminal else HORIZON_EXHAUSTED
    return PlanResult(best.actions, best.trajectory, best.score, status, stats, log, trace)


def brute_force_plan(env_kind: EnvLike, instance, o0, goal, max_depth: int, node_cap: int = 10**6) -> PlanResult:
    """Shortest goal-reaching plan under the true dynamics, by breadth-first enumeration.

    Stochastic outcomes are represented by their first variant; environments
    whose stochastic detail does not affect legality or goals collapse such
    variants through ``search_key``.
    """
    env = _env(env_kind)
    if env.goal_reached(instance, o0, goal):
        return PlanResult((), (), 0.0, COMPLETE)
    seen = {env.search_key(o0)}
    frontier = deque([(o0, (), ())])
    generated = 1
    while frontier:
        obs, acts, traj = frontier.popleft()
        if len(acts) >= max_depth or env.is_terminal(instance, obs):
            continue
        for a in env.legal_actions(instance, obs):
            nxt = env.first_outcome(instance, obs, a)
            generated += 1
            if generated > node_cap:
                raise TreeTooLarge(f"more than {node_cap} nodes within depth {max_depth}")
            key = env.search_key(nxt)
            if key in seen:
                continue
            seen.add(key)
            if env.goal_reached(instance, nxt, goal):
                return PlanResult(acts + (a,), traj + (nxt,), -float(len(acts) + 1), COMPLETE)
            frontier.append((nxt, acts + (a,), traj + (nxt,)))
    return PlanResult((), (), -float(INFEASIBLE), NO_VALID_TRANSITIONS)
