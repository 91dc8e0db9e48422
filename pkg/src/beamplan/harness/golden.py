"""The three worked examples as self-checks, runnable from the CLI."""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..core import EnvKind, PlannerConfig, RoleStreams
from ..envs import get_env
from ..envs.golden import GOLDEN, golden_plan
from ..planner import COMPLETE, plan
from ..surrogate import oracle_models
from .execute import execute_plan


@dataclass(frozen=True)
class GoldenCheck:
    name: str
    passed: bool
    detail: str
    seconds: float


def _maze() -> tuple[bool, str]:
    inst, _ = golden_plan(EnvKind.MAZE)
    env = get_env(EnvKind.MAZE)
    o0, goal = env.initial_obs(inst), env.goal(inst)
    cfg = PlannerConfig(beams=2, action_branch=4, dynamics_branch=1, horizon=8)
    result = plan(env, inst, o0, goal, oracle_models(), cfg, RoleStreams.for_episode(0, 0))
    ex = execute_plan(env, inst, o0, goal, result.actions)
    ok = result.status == COMPLETE and len(result.actions) == 4 and ex.success
    return ok, f"status={result.status} length={len(result.actions)} executed={ex.success}"


def _fetch() -> tuple[bool, str]:
    inst, actions = golden_plan(EnvKind.FETCH)
    env = get_env(EnvKind.FETCH)
    o0, goal = env.initial_obs(inst), env.goal(inst)
    v = env.value(inst, o0, goal)
    ex = execute_plan(env, inst, o0, goal, actions)
    split = (v.components["pickup"], v.components["drop"], v.steps_remaining)
    ok = ex.success and ex.trace[-1].apple_on_table and split == (6, 4, 10)
    return ok, f"apple_on_table={ex.trace[-1].apple_on_table} value={split}"


def _table() -> tuple[bool, str]:
    inst, actions = golden_plan(EnvKind.TABLE)
    env = get_env(EnvKind.TABLE)
    o0, goal = env.initial_obs(inst), env.goal(inst)
    ex = execute_plan(env, inst, o0, goal, actions)
    values = [env.value(inst, o, goal).steps_remaining for o in ex.trace]
    ok = ex.success and values == [2, 1, 0]
    return ok, f"executed={ex.success} values={values}"


_CHECKS = {EnvKind.MAZE: _maze, EnvKind.FETCH: _fetch, EnvKind.TABLE: _table}


def run_golden() -> list[GoldenCheck]:
    out = []
    for kind in GOLDEN:
        t0 = time.perf_counter()
        ok, detail = _CHECKS[kind]()
        out.append(GoldenCheck(kind.value, bool(ok), detail, time.perf_counter() - t0))
    return out
