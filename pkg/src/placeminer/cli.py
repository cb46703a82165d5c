"""Command-line surface: discover, sweep, evaluate.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import figures, pnml, sweep as sweep_mod
from .discovery import SCHEMA_VERSION, build_manifest, run_discovery
from .errors import PlaceMinerError
from .eventlog import EventLog, augment_endpoints, parse_csv, parse_xes
from .quality import summarize
from .selection import ADAPT_KINDS, DiscoveryConfig, as_fraction
from .fitness import METRICS, Evaluator


def _unit_fraction(text: str) -> Fraction:
    try:
        value = as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from exc
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"{text!r} must lie in [0, 1]")
    return value


def _queue_limit(text: str):
    if text == "unlimited":
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("queue limit must be positive or 'unlimited'")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be a positive integer")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be nonnegative")
    return value


def _depth(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("max depth must be at least 2")
    return value


def _csv_list(parser_fn):
    def parse(text: str):
        return tuple(parser_fn(part.strip()) for part in text.split(",") if part.strip())

    return parse


def _add_log_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--log", required=True, help="event log (.xes or .csv)")
    parser.add_argument("--case-column", default="case")
    parser.add_argument("--activity-column", default="activity")
    parser.add_argument("--order-column", default="order")


def _add_config_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--tau", type=_unit_fraction, default=as_fraction("0.6"),
                        help="minimal replay fraction every place and the net must reach")
    parser.add_argument("--delta", type=_unit_fraction, default=as_fraction("0.15"),
                        help="cap on the replayable-trace reduction one place may cause")
    parser.add_argument("--metric", choices=METRICS, default="combined")
    parser.add_argument("--adapt", choices=ADAPT_KINDS, default="sigmoid")
    parser.add_argument("--steepness", type=_positive_int, default=3)
    parser.add_argument("--queue-limit", type=_queue_limit, default=1000,
                        metavar="N|unlimited")
    parser.add_argument("--extra-depth", type=_nonnegative_int, default=0,
                        help="extra queue passes with artificially increased depth")
    parser.add_argument("--max-depth", type=_depth, default=5,
                        help="deepest candidate tree level to traverse")
    parser.add_argument("--order", choices=("lex", "freq"), default="lex",
                        help="activity ordering shaping the candidate tree")


def load_log(args) -> EventLog:
    path = Path(args.log)
    if path.suffix.lower() == ".csv":
        return parse_csv(path, args.case_column, args.activity_column, args.order_column)
    if path.suffix.lower() in (".json",):
        return EventLog.from_canonical_json(path.read_bytes())
    return parse_xes(path)


def _config_from_args(args) -> DiscoveryConfig:
    return DiscoveryConfig.create(
        tau=args.tau, delta=args.delta, metric=args.metric, adapt=args.adapt,
        steepness=args.steepness, queue_limit=args.queue_limit,
        extra_depth=args.extra_depth, max_depth=args.max_depth, order=args.order)


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
                    encoding="utf-8")


def cmd_discover(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _config_from_args(args)

    t_start = time.perf_counter()
    raw = load_log(args)
    ingest_seconds = time.perf_counter() - t_start

    result = run_discovery(raw, config)

    t_export = time.perf_counter()
    (out / "model.pnml").write_bytes(pnml.export_pnml(result.net))
    (out / "model.dot").write_bytes(pnml.export_dot(result.net))
    with open(out / "selection.jsonl", "w", encoding="utf-8") as handle:
        for decision in result.selection.trace:
            handle.write(json.dumps(decision, ensure_ascii=False, sort_keys=True) + "\n")
    manifest = build_manifest(result, {"ingest": ingest_seconds})
    figures.render_run_overview(manifest, out / "run_overview.png")
    manifest["timing"]["phases"]["export"] = time.perf_counter() - t_export
    manifest["timing"]["total"] = sum(manifest["timing"]["phases"].values())
    _write_json(out / "report.json", manifest)

    print(f"discovered net with {len(result.net.places)} places over "
          f"{len(result.net.activities)} activities; "
          f"replayable fraction {float(result.quality.replayable_fraction):.3f}")
    print(f"artifacts written to {out}")
    return 0


def cmd_sweep(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    raw = load_log(args)
    configs = sweep_mod.grid_configs(
        taus=args.tau, deltas=args.delta, metrics=args.metric, adapts=args.adapt,
        steepnesses=args.steepness, queue_limits=args.queue_limit,
        extra_depths=args.extra_depth, max_depth=args.max_depth, order=args.order)
    rows = sweep_mod.run_sweep(raw, configs, budget=args.budget, workers=args.workers)
    (out / "sweep.csv").write_text(sweep_mod.rows_to_csv(rows), encoding="utf-8")
    figures.render_sweep_overview(rows, out / "sweep_overview.png")
    figures.render_coverage_by_metric(rows, out / "coverage_by_metric.png")
    print(f"{len(rows)} runs written to {out / 'sweep.csv'}")
    return 0


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    net = pnml.parse_pnml(Path(args.model).read_bytes())
    raw = load_log(args)
    log = augment_endpoints(raw)
    blocked: list = []
    report = summarize(net, log, Evaluator(log), blocked)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "log": {"digest": raw.digest(), "traces": log.total},
        "model": {"activities": sorted(net.activities),
                  "places": [str(p) for p in net.sorted_places()]},
        "quality": report.as_dict(),
        "blocked_prefixes": blocked,
    }
    _write_json(out / "report.json", payload)
    print(json.dumps(payload["quality"], indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="placeminer",
        description="Discover Petri nets with replay guarantees from event logs")
    commands = parser.add_subparsers(dest="command", required=True)

    discover = commands.add_parser("discover", help="mine a net from an event log")
    _add_log_arguments(discover)
    _add_config_arguments(discover)
    discover.add_argument("--out", default="out")
    discover.set_defaults(handler=cmd_discover)

    sweep = commands.add_parser("sweep", help="run a parameter grid, one CSV row per run")
    _add_log_arguments(sweep)
    sweep.add_argument("--tau", type=_csv_list(_unit_fraction),
                       default=("0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9"))
    sweep.add_argument("--delta", type=_csv_list(_unit_fraction),
                       default=("0.05", "0.1", "0.15", "0.2", "0.25"))
    sweep.add_argument("--metric", type=_csv_list(str), default=("relative", "combined"))
    sweep.add_argument("--adapt", type=_csv_list(str), default=ADAPT_KINDS)
    sweep.add_argument("--steepness", type=_csv_list(_positive_int), default=(1, 2, 3, 4, 5))
    sweep.add_argument("--queue-limit", type=_csv_list(_queue_limit),
                       default=(100, 1000, 10000), metavar="LIST")
    sweep.add_argument("--extra-depth", type=_csv_list(_nonnegative_int), default=(0, 10))
    sweep.add_argument("--max-depth", type=_depth, default=5)
    sweep.add_argument("--order", choices=("lex", "freq"), default="lex")
    sweep.add_argument("--budget", type=_positive_int, default=10000,
                       help="refuse cross products larger than this")
    sweep.add_argument("--workers", type=_positive_int, default=1)
    sweep.add_argument("--out", default="out")
    sweep.set_defaults(handler=cmd_sweep)

    evaluate = commands.add_parser("evaluate", help="score an existing PNML net against a log")
    evaluate.add_argument("--model", required=True)
    _add_log_arguments(evaluate)
    evaluate.add_argument("--out", default="out")
    evaluate.set_defaults(handler=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except PlaceMinerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
