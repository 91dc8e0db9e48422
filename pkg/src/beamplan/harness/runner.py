"""Episode loop, metric aggregation, filtering ablation and parameter sweeps."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from ..core import RngStreamKey, RoleStreams, derive_stream
from ..envs import get_env
from ..filtering import REJECT_REASONS
from ..planner import NO_VALID_TRANSITIONS, PlanResult, plan
from ..surrogate import SurrogateModels
from .config import ExperimentConfig
from .execute import PLANNER_NO_VALID, execute_plan
from .stats import diff_interval, wilson_interval

log = logging.getLogger(__name__)

METRIC_COLUMNS = (
    "config_id",
    "env",
    "n_episodes",
    "success_rate",
    "raw_dynamics_validity",
    "accepted_dynamics_validity",
    "acceptance_rate",
    "mean_plan_length",
)


@dataclass
class EpisodeRecord:
    episode_index: int
    env_kind: str
    instance: dict[str, Any]
    cfg: dict[str, Any]
    noise: dict[str, Any]
    plan: dict[str, Any]
    executed_success: bool
    executed_steps: int
    failure_mode: str
    candidate_log: list[dict[str, Any]]

    def to_json(self) -> dict[str, Any]:
        return {
            "episode_index": self.episode_index,
            "env_kind": self.env_kind,
            "instance": self.instance,
            "cfg": self.cfg,
            "noise": self.noise,
            "plan": self.plan,
            "executed_success": self.executed_success,
            "executed_steps": self.executed_steps,
            "failure_mode": self.failure_mode,
            "candidate_log": self.candidate_log,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


@dataclass
class Metrics:
    n_episodes: int
    successes: int
    success_rate: float
    n_candidates: int
    n_valid: int
    n_accepted: int
    n_accepted_valid: int
    raw_dynamics_validity: float
    accepted_dynamics_validity: float
    acceptance_rate: float
    reject_reason_histogram: dict[str, int]
    mean_plan_length: float
    accepted_per_step: float

    def row(self, config_id: str, env: str) -> dict[str, Any]:
        return {
            "config_id": config_id,
            "env": env,
            "n_episodes": self.n_episodes,
            "success_rate": self.success_rate,
            "raw_dynamics_validity": self.raw_dynamics_validity,
            "accepted_dynamics_validity": self.accepted_dynamics_validity,
            "acceptance_rate": self.acceptance_rate,
            "mean_plan_length": self.mean_plan_length,
        }


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def run_episode(cfg: ExperimentConfig, episode_index: int, keep_result: bool = False):
    """Plan and execute one seeded episode; returns its record (and the raw PlanResult on request)."""
    env = get_env(cfg.env)
    inst_rng = derive_stream(RngStreamKey(cfg.seed, episode_index, "instance"))
    instance = env.random_instance(cfg.env_params, inst_rng)
    o0, goal = env.initial_obs(instance), env.goal(instance)
    streams = RoleStreams.for_episode(cfg.seed, episode_index)
    models = SurrogateModels(cfg.noise, cfg.policy)
    result = plan(env, instance, o0, goal, models, cfg.planner, streams)
    ex = execute_plan(env, instance, o0, goal, result.actions, streams.env)
    mode = ex.failure_mode
    if not ex.success and result.status == NO_VALID_TRANSITIONS:
        mode = PLANNER_NO_VALID
    cands = []
    for step, c in result.candidates:
        entry = c.summary()
        entry["step"] = step
        entry["valid"] = bool(env.valid_next(instance, c.obs, c.action, c.predicted))
        cands.append(entry)
    record = EpisodeRecord(
        episode_index=episode_index,
        env_kind=env.kind.value,
        instance=env.instance_to_json(instance),
        cfg=cfg.to_json()["planner"],
        noise=cfg.noise.to_json(),
        plan=result.to_json(),
        executed_success=ex.success,
        executed_steps=ex.steps,
        failure_mode=mode,
        candidate_log=cands,
    )
    return (record, result) if keep_result else record


def _episode_json(args: tuple[ExperimentConfig, int]) -> str:
    cfg, i = args
    return run_episode(cfg, i).dumps()


def run_records(cfg: ExperimentConfig, n_episodes: int, jobs: int = 1) -> list[EpisodeRecord]:
    """All episode records, ordered by episode index regardless of ``jobs``."""
    if n_episodes < 0:
        raise ValueError("n_episodes must be non-negative")
    work = [(cfg, i) for i in range(n_episodes)]
    if jobs > 1 and n_episodes > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            lines = list(pool.map(_episode_json, work, chunksize=max(1, n_episodes // (4 * jobs))))
        return [_record_from_json(json.loads(s)) for s in lines]
    return [run_episode(cfg, i) for i in range(n_episodes)]


def _record_from_json(d: dict[str, Any]) -> EpisodeRecord:
    return EpisodeRecord(**d)


def aggregate(records: Sequence[EpisodeRecord]) -> Metrics:
    n = len(records)
    successes = sum(r.executed_success for r in records)
    hist = {reason: 0 for reason in REJECT_REASONS}
    n_cand = n_valid = n_acc = n_acc_valid = steps = 0
    lengths = []
    for r in records:
        lengths.append(len(r.plan["actions"]))
        steps += r.plan["stats"]["steps"]
        for c in r.candidate_log:
            n_cand += 1
            n_valid += c["valid"]
            if c["verdict"] == "accepted":
                n_acc += 1
                n_acc_valid += c["valid"]
            else:
                hist[c["reject_reason"]] += 1
    return Metrics(
        n_episodes=n,
        successes=successes,
        success_rate=_ratio(successes, n),
        n_candidates=n_cand,
        n_valid=n_valid,
        n_accepted=n_acc,
        n_accepted_valid=n_acc_valid,
        raw_dynamics_validity=_ratio(n_valid, n_cand),
        accepted_dynamics_validity=_ratio(n_acc_valid, n_acc),
        acceptance_rate=_ratio(n_acc, n_cand),
        reject_reason_histogram=hist,
        mean_plan_length=_ratio(sum(lengths), n),
        accepted_per_step=_ratio(n_acc, steps),
    )


def _write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict[str, Any]]) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    path.write_text(buf.getvalue())


def write_outputs(out_dir: Union[str, Path], cfg: ExperimentConfig, records: Sequence[EpisodeRecord], metrics: Metrics) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "episodes.jsonl").write_text("".join(r.dumps() + "\n" for r in records))
    _write_csv(out / "metrics.csv", METRIC_COLUMNS, [metrics.row(cfg.config_id(), cfg.env.value)])


def run_eval(
    cfg: ExperimentConfig,
    n_episodes: int,
    out_dir: Optional[Union[str, Path]] = None,
    jobs: int = 1,
) -> Metrics:
    records = run_records(cfg, n_episodes, jobs)
    metrics = aggregate(records)
    if out_dir is not None:
        write_outputs(out_dir, cfg, records, metrics)
    log.info("%s: success %.3f over %d episodes", cfg.env.value, metrics.success_rate, n_episodes)
    return metrics


@dataclass
class AblationResult:
    on: Metrics
    off: Metrics
    deltas: dict[str, float] = field(default_factory=dict)
    intervals: dict[str, tuple[float, float]] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "on": self.on.__dict__,
            "off": self.off.__dict__,
            "deltas": self.deltas,
            "intervals": {k: list(v) for k, v in self.intervals.items()},
        }


def ablate_filtering(
    cfg: ExperimentConfig,
    n_episodes: int,
    out_dir: Optional[Union[str, Path]] = None,
    jobs: int = 1,
) -> AblationResult:
    """Run the same seeded episodes with filtering on and off.

    Both arms share the master seed, so instances and every role stream start
    identical; only the filter (and the check stream it alone consumes) differs.
    """
    on_cfg = replace(cfg, planner=replace(cfg.planner, filtering_enabled=True))
    off_cfg = replace(cfg, planner=replace(cfg.planner, filtering_enabled=False))
    on = run_eval(on_cfg, n_episodes, None if out_dir is None else Path(out_dir) / "on", jobs)
    off = run_eval(off_cfg, n_episodes, None if out_dir is None else Path(out_dir) / "off", jobs)
    deltas = {
        "success_rate": on.success_rate - off.success_rate,
        "accepted_dynamics_validity": on.accepted_dynamics_validity - off.accepted_dynamics_validity,
        "filter_gain": on.accepted_dynamics_validity - on.raw_dynamics_validity,
    }
    intervals = {
        "success_rate": diff_interval(on.successes, on.n_episodes, off.successes, off.n_episodes),
        "filter_gain": diff_interval(on.n_accepted_valid, on.n_accepted, on.n_valid, on.n_candidates),
        "success_on": wilson_interval(on.successes, on.n_episodes),
        "success_off": wilson_interval(off.successes, off.n_episodes),
    }
    result = AblationResult(on, off, deltas, intervals)
    if out_dir is not None:
        Path(out_dir, "ablation.json").write_text(json.dumps(result.to_json(), sort_keys=True, indent=2))
    return result


def sweep(
    cfg: ExperimentConfig,
    param_path: str,
    values: Sequence[Any],
    n_episodes: int,
    out_dir: Optional[Union[str, Path]] = None,
    jobs: int = 1,
) -> list[dict[str, Any]]:
    """One evaluation per value of ``param_path``; everything else (seed included) fixed."""
    rows = []
    for v in values:
        point = cfg.with_value(param_path, v)
        m = run_eval(point, n_episodes, jobs=jobs)
        row = {param_path: v, **m.row(point.config_id(), point.env.value), "accepted_per_step": m.accepted_per_step}
        rows.append(row)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "sweep.csv", [param_path, *METRIC_COLUMNS, "accepted_per_step"], rows)
    return rows


def replay(record: dict[str, Any], cfg: ExperimentConfig) -> EpisodeRecord:
    return run_episode(cfg, record["episode_index"])


__all__ = [
    "AblationResult",
    "EpisodeRecord",
    "METRIC_COLUMNS",
    "Metrics",
    "PlanResult",
    "ablate_filtering",
    "aggregate",
    "replay",
    "run_episode",
    "run_eval",
    "run_records",
    "sweep",
    "write_outputs",
]
