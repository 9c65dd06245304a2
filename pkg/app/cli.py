"""Command-line entry point: ``netcode run|sweep|capacity|compat|selftest|serve``."""

import argparse
import json
import logging
import sys

from pydantic import BaseModel

from app.core.config import settings
from app.core.errors import InternalError, NetcodeError, UsageError
from app.core.log_config import configure_logging
from app.models.experiment import ExperimentConfig
from app.services import experiment_service
from app.services.selftest_service import SUITES, run_selftest

logger = logging.getLogger(__name__)


def _c_range(value: str) -> range:
    try:
        low, high = (int(part) for part in value.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("C range must look like 1:6") from exc
    if low < 1 or high < low:
        raise argparse.ArgumentTypeError("C range needs 1 <= low <= high")
    return range(low, high + 1)


def _powers(value: str) -> list[tuple[int, int, int]]:
    try:
        return experiment_service.parse_powers(value)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(exc.detail) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netcode", description="Network error-correction against myopic adversaries"
    )
    parser.add_argument("--log-level", default=None, help="Override NETCODE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo trials for one experiment config")
    sweep = sub.add_parser("sweep", help="Every (assignment, strategy) pair on the min cut")
    for p in (run, sweep):
        p.add_argument("--config", required=True, help="Experiment config (JSON)")
        p.add_argument("--seed", type=int, default=None, help="Master seed (overrides config)")
        p.add_argument("--trials", type=int, default=None, help="Trial count (overrides config)")
        p.add_argument(
            "--fixed-codebook",
            action="store_true",
            help="One codebook per experiment (stream 0) instead of one per trial",
        )
    run.add_argument("--out", default=None, help="Results path (overrides config)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")

    cap = sub.add_parser("capacity", help="Regime and capacity table")
    cap.add_argument("--c-range", type=_c_range, default=range(1, 7), help="e.g. 1:6")
    cap.add_argument(
        "--powers", type=_powers, default=[(0, 1, 0), (0, 0, 1), (1, 0, 1)], help='"0,1,0;1,0,1"'
    )

    compat = sub.add_parser("compat", help="Compatible-count experiment")
    compat.add_argument("--n", type=int, default=6)
    compat.add_argument("--C", type=int, default=3)
    compat.add_argument("--z-r", type=int, default=1)
    compat.add_argument("--q", type=int, default=2)
    compat.add_argument("--M", type=int, default=256)
    compat.add_argument("--codebooks", type=int, default=1000)
    compat.add_argument("--seed", type=int, default=0)

    selftest = sub.add_parser("selftest", help="Exhaustive enumeration-oracle suites")
    selftest.add_argument("--suite", action="append", choices=sorted(SUITES), default=None)

    serve = sub.add_parser("serve", help="Serve the HTTP API with uvicorn")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _print(payload: BaseModel | list[BaseModel]) -> None:
    if isinstance(payload, list):
        data = [item.model_dump(mode="json") for item in payload]
    else:
        data = payload.model_dump(mode="json")
    print(json.dumps(data, indent=2))


def _load(args: argparse.Namespace) -> ExperimentConfig:
    cfg = experiment_service.load_config(args.config)
    updates: dict = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.fixed_codebook:
        updates["codebook"] = {**cfg.codebook.model_dump(), "fixed": True}
    return experiment_service.with_overrides(cfg, **updates) if updates else cfg


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "run":
        cfg = _load(args)
        report = experiment_service.run_trials(cfg)
        out = args.out or cfg.out
        if out:
            experiment_service.emit_results(report, out, args.format)
        _print(report.stats)
        return 0
    if args.command == "sweep":
        _print(experiment_service.run_sweep(_load(args)))
        return 0
    if args.command == "capacity":
        _print(experiment_service.capacity_table(args.c_range, args.powers))
        return 0
    if args.command == "compat":
        _print(
            experiment_service.compatible_count_experiment(
                args.n, args.C, args.z_r, args.q, args.M, args.codebooks, args.seed
            )
        )
        return 0
    if args.command == "selftest":
        results = run_selftest(args.suite)
        for r in results:
            print(f"{'ok  ' if r.passed else 'FAIL'} {r.name:<24} {r.seconds:6.2f}s  {r.detail}")
        return 0 if all(r.passed for r in results) else 1
    if args.command == "serve":
        import uvicorn

        uvicorn.run("app.main:app", host=args.host, port=args.port)
        return 0
    raise InternalError(f"unhandled command {args.command}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or settings.log_level or "INFO")
    try:
        return _dispatch(args)
    except NetcodeError as e:
        logger.error("%s: %s", type(e).__name__, e.detail)
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
