"""Command-line surface: batch runs, record aggregation, and the service."""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .experiment import (ExperimentPlan, PlanItem, run_experiment,
                         stats_from_directory)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="novamaze",
        description="Maze-navigation neuroevolution: automated searches, "
                    "interactive sessions, and the session service.",
    )
    parser.add_argument("--config", default=None,
                        help="TOML or JSON engine config (default: "
                             "$NOVAMAZE_CONFIG if set)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a batch of seeded runs")
    run.add_argument("--mode", required=True,
                     choices=["fitness", "novelty", "waypoint", "naiec-scripted"])
    run.add_argument("--map", required=True, dest="map_name")
    run.add_argument("--runs", type=int, default=1)
    run.add_argument("--budget", type=int, default=250000)
    run.add_argument("--seed", type=int, default=0,
                     help="base seed; run i uses seed + i")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--maps-dir", default=None,
                     help="directory of *.maze.json files (default: built-in maps)")

    stats = sub.add_parser("stats", help="aggregate a record directory to CSV")
    stats.add_argument("directory")

    serve = sub.add_parser("serve", help="run the session service")
    serve.add_argument("--bind", default="127.0.0.1:8765", help="HOST:PORT")
    serve.add_argument("--maps", default=None, dest="maps_dir",
                       help="directory of *.maze.json files")
    serve.add_argument("--records", default=None, dest="records_dir",
                       help="directory for published run records")
    return parser


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    plan = ExperimentPlan(
        items=[PlanItem(mode=args.mode, map_name=args.map_name,
                        runs=args.runs, budget=args.budget,
                        base_seed=args.seed)],
        out_dir=args.out,
    )
    done = 0

    def announce(record) -> None:
        nonlocal done
        done += 1
        state = "solved" if record.solved else "unsolved"
        print(f"[{done}/{args.runs}] {record.record_id}: {state} "
              f"after {record.evaluations_used} evaluations", flush=True)

    result = run_experiment(plan, config, maps_dir=args.maps_dir,
                            on_record=announce)
    for failure in result.failures:
        print(f"FAILED {failure.mode}/{failure.map_name} seed {failure.seed}: "
              f"{failure.error}", file=sys.stderr)
    print(f"records: {args.out}/records  stats: {result.csv_path}")
    sys.stdout.write(result.csv_path.read_text())
    return 1 if result.failures else 0


def cmd_stats(args: argparse.Namespace) -> int:
    sys.stdout.write(stats_from_directory(args.directory))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import build_app

    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        print(f"--bind must be HOST:PORT, got {args.bind!r}", file=sys.stderr)
        return 2
    config = load_config(args.config)
    app = build_app(config, maps_dir=args.maps_dir,
                    records_dir=args.records_dir)
    uvicorn.run(app, host=host, port=int(port), log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "stats":
        return cmd_stats(args)
    return cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
