"""Command-line interface: run one episode, run a seeded batch, report tables.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 contract violation (inconsistent inputs).
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import episode_config, load_run_config
from .episode import generate_scenario, run_episode
from .errors import ConfigError, ContractViolation, GenerationError, RecordFormatError
from .harness import (
    RunMatrix,
    aggregate,
    export_trajectory,
    read_records,
    record_payload,
    render_summary,
    render_triggers,
    run_batch,
    tables_to_dict,
    write_records,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _csv_choices(raw: str, allowed, what: str) -> tuple[str, ...]:
    items = tuple(item.strip() for item in raw.split(",") if item.strip())
    if not items or any(item not in allowed for item in items):
        raise _UsageError(f"{what} must be a comma-separated subset of {', '.join(allowed)}")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="preysim", description="Pursuit-evasion rover simulator and experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a single episode and print its record")
    run.add_argument("--seed", type=int, required=True, help="scenario seed (non-negative)")
    run.add_argument("--config", choices=("A", "B", "C"), required=True, help="preservation configuration")
    run.add_argument("--mode", choices=("persistent", "cautious"), default="persistent", help="drone pursuit mode")
    run.add_argument("--trace", metavar="PATH", help="also write the trajectory CSV here")
    run.add_argument("--params", metavar="PATH", help="YAML run-configuration file")
    run.set_defaults(handler=_cmd_run)

    batch = sub.add_parser("batch", help="run the scenario/configuration matrix")
    batch.add_argument("--master-seed", type=int, required=True, help="seed deriving every scenario seed")
    batch.add_argument("--n", type=int, default=150, help="number of scenarios (default 150)")
    batch.add_argument("--configs", default="A,B,C", help="comma-separated configurations (default A,B,C)")
    batch.add_argument("--modes", default="persistent,cautious", help="comma-separated pursuit modes")
    batch.add_argument("--out", metavar="PATH", required=True, help="records file to write (JSON lines)")
    batch.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    batch.add_argument("--params", metavar="PATH", help="YAML run-configuration file")
    batch.set_defaults(handler=_cmd_batch)

    report = sub.add_parser("report", help="aggregate a records file into outcome and trigger tables")
    report.add_argument("--in", dest="input", metavar="PATH", required=True, help="records file to read")
    report.add_argument("--format", choices=("text", "json", "both"), default="text", help="output format")
    report.set_defaults(handler=_cmd_report)
    return parser


def _cmd_run(args) -> int:
    if args.seed < 0:
        raise _UsageError("--seed must be non-negative")
    run = load_run_config(args.params)
    scenario = generate_scenario(
        args.seed,
        arena_side=run.arena.side,
        min_separation=run.arena.min_separation,
        min_goal_distance=run.arena.min_goal_distance,
    )
    config = episode_config(run, args.config, args.mode, record_trace=args.trace is not None)
    record = run_episode(scenario, config)
    if args.trace:
        export_trajectory(record, args.trace)
    print(json.dumps(record_payload(record)))
    return 0


def _cmd_batch(args) -> int:
    if args.master_seed < 0:
        raise _UsageError("--master-seed must be non-negative")
    if args.n <= 0:
        raise _UsageError("--n must be positive")
    if args.jobs <= 0:
        raise _UsageError("--jobs must be positive")
    run = load_run_config(args.params)
    matrix = RunMatrix(
        master_seed=args.master_seed,
        n_scenarios=args.n,
        preservations=_csv_choices(args.configs, ("A", "B", "C"), "--configs"),
        modes=_csv_choices(args.modes, ("persistent", "cautious"), "--modes"),
    )
    records = run_batch(matrix, run, jobs=args.jobs)
    write_records(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_report(args) -> int:
    records = read_records(args.input)
    summary, triggers = aggregate(records)
    if args.format in ("text", "both"):
        print(render_summary(summary))
        print()
        print(render_triggers(triggers))
    if args.format in ("json", "both"):
        print(json.dumps(tables_to_dict(summary, triggers), indent=2))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"preysim: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"preysim: error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"preysim: configuration error: {exc}", file=sys.stderr)
        return 1
    except RecordFormatError as exc:
        print(f"preysim: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"preysim: i/o error: {exc}", file=sys.stderr)
        return 2
    except (ContractViolation, GenerationError) as exc:
        print(f"preysim: {exc}", file=sys.stderr)
        return 3
