"""Evaluation harness: ground-truth execution, metrics, ablations, sweeps and the CLI."""

from .config import DEFAULT_ENV_PARAMS, DEFAULT_PLANNER, ExperimentConfig
from .execute import FAILURE_MODES, ExecutionResult, execute_plan
from .golden import GoldenCheck, run_golden
from .runner import (
    METRIC_COLUMNS,
    AblationResult,
    EpisodeRecord,
    Metrics,
    ablate_filtering,
    aggregate,
    replay,
    run_episode,
    run_eval,
    sweep,
)
from .stats import diff_interval, wilson_interval

__all__ = [
    "DEFAULT_ENV_PARAMS",
    "DEFAULT_PLANNER",
    "FAILURE_MODES",
    "METRIC_COLUMNS",
    "AblationResult",
    "EpisodeRecord",
    "ExecutionResult",
    "ExperimentConfig",
    "GoldenCheck",
    "Metrics",
    "ablate_filtering",
    "aggregate",
    "diff_interval",
    "execute_plan",
    "replay",
    "run_episode",
    "run_eval",
    "run_golden",
    "sweep",
    "wilson_interval",
]
