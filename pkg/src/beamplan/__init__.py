"""Beam-search planning over noisy symbolic world-model surrogates."""

from .core import (
    INFEASIBLE,
    EnvKind,
    PlannerConfig,
    RoleStreams,
    ValueEstimate,
    normalize_action,
    parse_action,
    render_action,
)
from .filtering import TransitionCandidate, actions_match, discriminate
from .planner import PlanResult, brute_force_plan, plan, select_top_b
from .surrogate import NoiseProfile, PolicyParams, SurrogateModels, ValueNoise, oracle_models

__version__ = "0.1.0"

__all__ = [
    "INFEASIBLE",
    "EnvKind",
    "NoiseProfile",
    "PlanResult",
    "PlannerConfig",
    "PolicyParams",
    "RoleStreams",
    "SurrogateModels",
    "TransitionCandidate",
    "ValueEstimate",
    "ValueNoise",
    "actions_match",
    "brute_force_plan",
    "discriminate",
    "normalize_action",
    "oracle_models",
    "parse_action",
    "plan",
    "render_action",
    "select_top_b",
]
