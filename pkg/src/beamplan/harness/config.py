"""Experiment configuration: JSON file sections, per-task defaults, and sweep paths."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping, Union

from ..core import EnvKind, PlannerConfig
from ..envs import get_env
from ..errors import InvalidConfig
from ..surrogate import NoiseProfile, PolicyParams

# Per-task beam widths and branching factors; horizons leave slack over the
# typical optimal trajectory length.
DEFAULT_PLANNER = {
    EnvKind.MAZE: PlannerConfig(beams=2, action_branch=4, dynamics_branch=1, horizon=12),
    EnvKind.FETCH: PlannerConfig(beams=2, action_branch=5, dynamics_branch=1, horizon=16),
    EnvKind.TABLE: PlannerConfig(beams=2, action_branch=4, dynamics_branch=4, horizon=12),
}

DEFAULT_ENV_PARAMS: dict[EnvKind, dict[str, Any]] = {
    EnvKind.MAZE: {"rows": [4, 6], "cols": [4, 6], "traps": [2, 5]},
    EnvKind.FETCH: {"rows": [5, 6], "cols": [5, 6], "table_len": [1, 3]},
    EnvKind.TABLE: {"misplaced": [3, 6]},
}

_SECTIONS = ("env", "env_params", "planner", "noise", "policy", "seed")


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvKind
    env_params: Mapping[str, Any] = field(default_factory=dict)
    planner: PlannerConfig = None  # type: ignore[assignment]
    noise: NoiseProfile = field(default_factory=NoiseProfile)
    policy: PolicyParams = field(default_factory=PolicyParams)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "env", EnvKind.coerce(self.env))
        if self.planner is None:
            object.__setattr__(self, "planner", DEFAULT_PLANNER[self.env])
        if not self.env_params:
            object.__setattr__(self, "env_params", copy.deepcopy(DEFAULT_ENV_PARAMS[self.env]))
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")
        self.planner.validate(get_env(self.env).max_legal_actions())

    def to_json(self) -> dict[str, Any]:
        return {
            "env": self.env.value,
            "env_params": copy.deepcopy(dict(self.env_params)),
            "planner": asdict(self.planner),
            "noise": self.noise.to_json(),
            "policy": self.policy.to_json(),
            "seed": int(self.seed),
        }

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "ExperimentConfig":
        unknown = set(d) - set(_SECTIONS)
        if unknown:
            raise InvalidConfig(f"unknown config sections {sorted(unknown)}")
        if "env" not in d:
            raise InvalidConfig("config must name an env")
        env = EnvKind.coerce(d["env"])
        try:
            planner = asdict(DEFAULT_PLANNER[env])
            extra = set(d.get("planner", {})) - set(planner)
            if extra:
                raise InvalidConfig(f"unknown planner fields {sorted(extra)}")
            planner.update(d.get("planner", {}))
            return cls(
                env=env,
                env_params=dict(d.get("env_params") or DEFAULT_ENV_PARAMS[env]),
                planner=PlannerConfig(**planner),
                noise=NoiseProfile.from_json(d.get("noise", {})),
                policy=PolicyParams.from_json(d.get("policy", {})),
                seed=int(d.get("seed", 0)),
            )
        except InvalidConfig:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise InvalidConfig(str(exc)) from exc

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        return cls.from_json(json.loads(Path(path).read_text()))

    def config_id(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha1(blob.encode()).hexdigest()[:12]

    def with_value(self, param_path: str, value: Any) -> "ExperimentConfig":
        """Copy with one numeric field replaced, addressed as ``section.field[.sub]``."""
        d = self.to_json()
        parts = param_path.split(".")
        if parts[0] not in _SECTIONS or parts[0] == "env":
            raise InvalidConfig(f"invalid param path {param_path!r}")
        if parts == ["seed"]:
            d["seed"] = int(value)
            return ExperimentConfig.from_json(d)
        node = d
        for p in parts[:-1]:
            if not isinstance(node, dict) or not isinstance(node.get(p), dict):
                raise InvalidConfig(f"invalid param path {param_path!r}")
            node = node[p]
        leaf = parts[-1]
        if leaf not in node:
            raise InvalidConfig(f"invalid param path {param_path!r}")
        old = node[leaf]
        if isinstance(old, bool) or not isinstance(old, (int, float, list)):
            raise InvalidConfig(f"{param_path!r} is not numeric")
        node[leaf] = int(value) if isinstance(old, int) and float(value).is_integer() else value
        return ExperimentConfig.from_json(d)
