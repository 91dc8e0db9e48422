"""Self-discriminated filtering of predicted transitions.

Every forward prediction is checked twice before it may extend a plan: the
object counts of the current and predicted observations must agree, and the
inverse model must recover the issued action from the (obs, prediction) pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence, Union

import numpy as np

from .core import Action, normalize_action, render_action
from .surrogate import EnvLike, NoiseProfile, SurrogateModels, _env

ACCEPTED, REJECTED = "accepted", "rejected"
ACTION_MISMATCH, COUNT_MISMATCH, NONE = "action_mismatch", "count_mismatch", "none"
REJECT_REASONS = (ACTION_MISMATCH, COUNT_MISMATCH)


@dataclass(frozen=True)
class TransitionCandidate:
    obs: Any
    action: Action
    predicted: Any
    verdict: str
    reject_reason: str = NONE
    inferred_action: Optional[Action] = None
    category: Optional[str] = None  # forward-model error category, when the model reports one

    def __post_init__(self) -> None:
        if (self.verdict == ACCEPTED) != (self.reject_reason == NONE):
            raise ValueError("accepted candidates carry reject_reason 'none' and only they do")

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPTED

    def summary(self) -> dict[str, Any]:
        return {
            "obs": self.obs.key(),
            "action": render_action(self.action),
            "predicted": self.predicted.key(),
            "verdict": self.verdict,
            "reject_reason": self.reject_reason,
            "inferred_action": None if self.inferred_action is None else render_action(self.inferred_action),
            "category": self.category,
        }


def actions_match(a: Action, b: Action) -> bool:
    return normalize_action(a) == normalize_action(b)


def count_consistent(env_kind: EnvLike, obs, predicted, models: Union[NoiseProfile, SurrogateModels], rng: np.random.Generator) -> bool:
    models = _as_models(models)
    env = _env(env_kind)
    return models.count(env, obs, rng) == models.count(env, predicted, rng)


def _as_models(models) -> SurrogateModels:
    if isinstance(models, NoiseProfile):
        return SurrogateModels(noise=models)
    return models


def _check(env, instance, obs, a, predicted, models, rng) -> tuple[str, Optional[Action]]:
    if not count_consistent(env, obs, predicted, models, rng):
        return COUNT_MISMATCH, None
    inferred = models.inverse(env, instance, obs, predicted, rng)
    if not actions_match(inferred, a):
        return ACTION_MISMATCH, inferred
    return NONE, inferred


def discriminate(
    env_kind: EnvLike,
    instance,
    obs,
    a: Action,
    D: int,
    models: Union[NoiseProfile, SurrogateModels],
    forward_rng: np.random.Generator,
    check_rng: np.random.Generator,
    filtering_enabled: bool = True,
    order: Optional[Sequence[int]] = None,
) -> list[TransitionCandidate]:
    """Draw D predictions for (obs, a) and label each accepted or rejected.

    Forward draws come only from ``forward_rng``. Each candidate's checks use
    their own generator seeded from one draw of ``check_rng`` and the
    candidate's index, so verdicts do not depend on ``order``. With filtering
    disabled every candidate is accepted and ``check_rng`` is untouched.
    """
    if D < 1:
        raise ValueError("D must be at least 1")
    env = _env(env_kind)
    models = _as_models(models)
    draws = []
    for _ in range(D):
        if hasattr(models, "sample"):
            draws.append(models.sample(env, instance, obs, a, forward_rng))
        else:
            draws.append((None, models.forward(env, instance, obs, a, forward_rng)))
    if not filtering_enabled:
        return [TransitionCandidate(obs, a, pred, ACCEPTED, category=cat) for cat, pred in draws]

    base = int(check_rng.integers(2**63))
    verdicts: dict[int, tuple[str, Optional[Action]]] = {}
    for j in order if order is not None else range(D):
        rng = np.random.default_rng([base, j])
        verdicts[j] = _check(env, instance, obs, a, draws[j][1], models, rng)
    if sorted(verdicts) != list(range(D)):
        raise ValueError("order must be a permutation of range(D)")
    out = []
    for j, (cat, pred) in enumerate(draws):
        reason, inferred = verdicts[j]
        out.append(
            TransitionCandidate(obs, a, pred, ACCEPTED if reason == NONE else REJECTED, reason, inferred, cat)
        )
    return out
