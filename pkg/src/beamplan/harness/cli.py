"""Command-line entry point: ``beamplan {plan,eval,ablate-filtering,sweep,golden}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional, Sequence

from ..core import EnvKind
from ..errors import BeamplanError
from .config import ExperimentConfig
from .golden import run_golden
from .runner import ablate_filtering, run_episode, run_eval, sweep

ENV_CHOICES = [k.value for k in EnvKind]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--env", choices=ENV_CHOICES, help="environment (overrides the config file)")
    p.add_argument("--config", type=Path, help="JSON experiment config")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--episodes", type=int, default=50)
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--no-filtering", action="store_true", help="accept every forward prediction unchecked")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beamplan", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan one episode and print the result as JSON")
    _add_common(p)
    p.add_argument("--episode-index", type=int, default=0)

    for name, text in (("eval", "evaluate a config"), ("ablate-filtering", "paired run with filtering on and off")):
        _add_common(sub.add_parser(name, help=text))

    p = sub.add_parser("sweep", help="evaluate once per value of one numeric config field")
    _add_common(p)
    p.add_argument("--param", required=True, help="dotted path, e.g. noise.p_wrong_effect")
    p.add_argument("--values", required=True, help="comma-separated numbers")

    sub.add_parser("golden", help="run the three worked-example checks")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        raw: dict[str, Any] = json.loads(args.config.read_text())
        if args.env is not None:
            if "env" in raw and EnvKind.coerce(raw["env"]) != EnvKind.coerce(args.env):
                # a different env invalidates env-specific sections
                raw = {k: v for k, v in raw.items() if k not in ("env_params", "planner")}
            raw["env"] = args.env
    elif args.env is not None:
        raw = {"env": args.env}
    else:
        raise SystemExit("either --env or --config is required")
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = ExperimentConfig.from_json(raw)
    if args.no_filtering:
        cfg = replace(cfg, planner=replace(cfg.planner, filtering_enabled=False))
    return cfg


def _number(text: str) -> float:
    v = float(text)
    return int(v) if v.is_integer() and "." not in text else v


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "golden":
        checks = run_golden()
        for c in checks:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail} ({c.seconds:.3f}s)")
        return 0 if all(c.passed for c in checks) else 1

    try:
        cfg = load_config(args)
        if args.command == "plan":
            record = run_episode(cfg, args.episode_index)
            print(json.dumps(record.to_json()["plan"] | {"executed_success": record.executed_success}, indent=2))
        elif args.command == "eval":
            m = run_eval(cfg, args.episodes, args.out, args.jobs)
            print(json.dumps(m.row(cfg.config_id(), cfg.env.value), indent=2))
        elif args.command == "ablate-filtering":
            res = ablate_filtering(cfg, args.episodes, args.out, args.jobs)
            print(json.dumps({"deltas": res.deltas, "intervals": res.intervals}, indent=2))
        elif args.command == "sweep":
            values = [_number(v) for v in args.values.split(",") if v.strip()]
            rows = sweep(cfg, args.param, values, args.episodes, args.out, args.jobs)
            print(json.dumps(rows, indent=2))
    except (BeamplanError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
