"""Ground-truth environments and kind-dispatching helpers."""

from __future__ import annotations

from typing import Any, Mapping, Union

import numpy as np

from ..core import Action, EnvKind, Goal
from .base import Environment
from .fetch import FetchEnv, FetchInstance, FetchObs, fetch_step, fetch_value_oracle
from .maze import MazeEnv, MazeInstance, MazeObs, maze_step, maze_value_oracle
from .table import (
    TableEnv,
    TableInstance,
    TableObs,
    table_step,
    table_valid_next,
    table_value_oracle,
)

_ENVS: dict[EnvKind, Environment] = {
    EnvKind.MAZE: MazeEnv(),
    EnvKind.FETCH: FetchEnv(),
    EnvKind.TABLE: TableEnv(),
}


def get_env(kind: Union[str, EnvKind]) -> Environment:
    return _ENVS[EnvKind.coerce(kind)]


def legal_actions(env_kind, instance, obs) -> list[Action]:
    return get_env(env_kind).legal_actions(instance, obs)


def goal_reached(env_kind, instance, obs, goal: Goal) -> bool:
    return get_env(env_kind).goal_reached(instance, obs, goal)


def random_instance(env_kind, params: Mapping[str, Any], rng: np.random.Generator, max_retries: int = 1000):
    return get_env(env_kind).random_instance(params, rng, max_retries)


__all__ = [
    "Environment",
    "FetchEnv",
    "FetchInstance",
    "FetchObs",
    "MazeEnv",
    "MazeInstance",
    "MazeObs",
    "TableEnv",
    "TableInstance",
    "TableObs",
    "fetch_step",
    "fetch_value_oracle",
    "get_env",
    "goal_reached",
    "legal_actions",
    "maze_step",
    "maze_value_oracle",
    "random_instance",
    "table_step",
    "table_valid_next",
    "table_value_oracle",
]
