"""Parameter sweeps: the cross product of config values, one quality row each.

Rows are sorted by config tuple regardless of completion order, so sweeps
are reproducible whether they run serially or across worker processes.
"""

from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .errors import BudgetError
from .eventlog import EventLog, augment_endpoints
from .fitness import Evaluator
from .discovery import run_discovery
from .selection import DiscoveryConfig, as_fraction

CSV_COLUMNS = [
    "tau", "delta", "metric", "adapt", "steepness", "queue_limit",
    "extra_depth", "max_depth", "order",
    "fitness", "precision", "activity_coverage", "simplicity", "f1", "hm",
    "replayable_fraction", "dead_transitions",
]


def grid_configs(
    taus=("0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9"),
    deltas=("0.05", "0.1", "0.15", "0.2", "0.25"),
    metrics=("relative", "combined"),
    adapts=("noDelta", "constant", "linear", "sigmoid"),
    steepnesses=(1, 2, 3, 4, 5),
    queue_limits=(100, 1000, 10000),
    extra_depths=(0, 10),
    max_depth=5,
    order="lex",
) -> list[DiscoveryConfig]:
    """Build the cross product, sorted by config tuple."""
    configs = []
    for tau, delta, metric, adapt, s, q, dplus in itertools.product(
            taus, deltas, metrics, adapts, steepnesses, queue_limits, extra_depths):
        configs.append(DiscoveryConfig.create(
            tau=as_fraction(tau), delta=as_fraction(delta), metric=metric,
            adapt=adapt, steepness=int(s),
            queue_limit=None if q in (None, "unlimited") else int(q),
            extra_depth=int(dplus), max_depth=max_depth, order=order))
    configs.sort(key=config_sort_key)
    return configs


def config_sort_key(config: DiscoveryConfig):
    return (
        config.tau, config.delta, config.metric, config.adapt, config.steepness,
        float("inf") if config.queue_limit is None else config.queue_limit,
        config.extra_depth, config.max_depth, config.order,
    )


def _decimal(value: Fraction) -> str:
    return format(float(value), "g")


def _row(config: DiscoveryConfig, result) -> dict:
    quality = result.quality
    return {
        "tau": _decimal(config.tau),
        "delta": _decimal(config.delta),
        "metric": config.metric,
        "adapt": config.adapt,
        "steepness": config.steepness,
        "queue_limit": "unlimited" if config.queue_limit is None else config.queue_limit,
        "extra_depth": config.extra_depth,
        "max_depth": config.max_depth,
        "order": config.order,
        "fitness": float(quality.fitness),
        "precision": float(quality.precision),
        "activity_coverage": float(quality.activity_coverage),
        "simplicity": float(quality.simplicity),
        "f1": float(quality.f1),
        "hm": float(quality.hm),
        "replayable_fraction": float(quality.replayable_fraction),
        "dead_transitions": result.dead_transition_count,
    }


_worker_state: dict = {}


def _worker_init(log_json: bytes):
    raw = EventLog.from_canonical_json(log_json)
    log = augment_endpoints(raw)
    _worker_state["raw"] = raw
    _worker_state["prepared"] = (log, Evaluator(log))


def _worker_run(config_kwargs: dict) -> dict:
    config = DiscoveryConfig.create(**config_kwargs)
    result = run_discovery(_worker_state["raw"], config, _worker_state["prepared"])
    return _row(config, result)


def _config_kwargs(config: DiscoveryConfig) -> dict:
    return {
        "tau": config.tau, "delta": config.delta, "metric": config.metric,
        "adapt": config.adapt, "steepness": config.steepness,
        "queue_limit": config.queue_limit, "extra_depth": config.extra_depth,
        "max_depth": config.max_depth, "order": config.order,
    }


def run_sweep(raw_log: EventLog, configs: list[DiscoveryConfig], budget: int = 10000,
              workers: int = 1) -> list[dict]:
    """One quality row per configuration; refuses oversized products."""
    if len(configs) > budget:
        raise BudgetError(
            f"sweep of {len(configs)} combinations exceeds the budget of {budget}")
    configs = sorted(configs, key=config_sort_key)
    if workers <= 1:
        log = augment_endpoints(raw_log)
        prepared = (log, Evaluator(log))
        return [_row(config, run_discovery(raw_log, config, prepared))
                for config in configs]
    rows: list[dict | None] = [None] * len(configs)
    with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                             initargs=(raw_log.to_canonical_json(),)) as pool:
        for index, row in enumerate(
                pool.map(_worker_run, [_config_kwargs(c) for c in configs],
                         chunksize=max(1, len(configs) // (workers * 8)))):
            rows[index] = row
    return rows  # type: ignore[return-value]


def rows_to_csv(rows: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()
