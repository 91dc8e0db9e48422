"""Ground-truth execution of a finished plan."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Union

import numpy as np

from ..core import Action, parse_action
from ..errors import BeamplanError
from ..surrogate import EnvLike, _env

NONE = "none"
TRAPPED = "trapped"
INVALID_ACTION = "invalid_action"
GOAL_NOT_REACHED = "goal_not_reached"
PLANNER_NO_VALID = "planner_no_valid_transitions"
FAILURE_MODES = (NONE, TRAPPED, INVALID_ACTION, GOAL_NOT_REACHED, PLANNER_NO_VALID)


@dataclass
class ExecutionResult:
    success: bool
    failure_mode: str
    steps: int
    trace: list[Any] = field(default_factory=list)
    failed_at: Optional[int] = None


def execute_plan(
    env_kind: EnvLike,
    instance,
    o0,
    goal,
    actions: Sequence[Union[Action, str]],
    rng: Optional[np.random.Generator] = None,
) -> ExecutionResult:
    """Step the true environment through ``actions``.

    Stops at the first trap entry or rule violation. An absorbing goal state
    (the maze gift) also ends execution early.
    """
    env = _env(env_kind)
    if rng is None:
        rng = np.random.default_rng(0)
    obs = o0
    trace = [obs]
    for i, a in enumerate(actions):
        if env.is_terminal(instance, obs):
            break
        try:
            if isinstance(a, str):
                a = parse_action(a, env.kind)
            obs = env.step(instance, obs, a, rng)
        except BeamplanError:
            return ExecutionResult(False, INVALID_ACTION, i, trace, i)
        trace.append(obs)
        if env.is_terminal(instance, obs) and not env.goal_reached(instance, obs, goal):
            return ExecutionResult(False, TRAPPED, i + 1, trace, i)
    if env.goal_reached(instance, obs, goal):
        return ExecutionResult(True, NONE, len(trace) - 1, trace)
    return ExecutionResult(False, GOAL_NOT_REACHED, len(trace) - 1, trace)
