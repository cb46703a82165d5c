"""Greedy place selection with a global replay-fraction guarantee.

During the BFS over the candidate tree, every fitting place is either
accepted immediately, parked in a bounded queue of potential places, or
discarded forever. ``keep`` guards the running guarantee (the net keeps
replaying at least tau*|L| traces); ``add`` additionally caps how many
currently replayable traces one place may sacrifice, with the cap shaped by
a delta adaption function that favors simple places early.
"""

from __future__ import annotations

import math
import time
from bisect import insort
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .candidates import ActivityOrderings, TraversalStats, bfs_traverse
from .errors import ConfigError
from .eventlog import EventLog
from .fitness import METRICS, Evaluator, PlaceVerdict
from .petri import Place

ADAPT_KINDS = ("noDelta", "constant", "linear", "sigmoid")


def as_fraction(value) -> Fraction:
    """Exact rational from a decimal literal; floats go through their str form."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class DiscoveryConfig:
    tau: Fraction = Fraction(6, 10)
    delta: Fraction = Fraction(15, 100)
    metric: str = "combined"
    adapt: str = "sigmoid"
    steepness: int = 3
    queue_limit: int | None = 1000
    extra_depth: int = 0
    max_depth: int = 5
    order: str = "lex"

    @classmethod
    def create(cls, **kwargs) -> "DiscoveryConfig":
        for key in ("tau", "delta"):
            if key in kwargs:
                kwargs[key] = as_fraction(kwargs[key])
        config = cls(**kwargs)
        config.validate()
        return config

    def validate(self):
        if not 0 <= self.tau <= 1:
            raise ConfigError("tau must lie in [0, 1]")
        if not 0 <= self.delta <= 1:
            raise ConfigError("delta must lie in [0, 1]")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}")
        if self.adapt not in ADAPT_KINDS:
            raise ConfigError(f"adapt must be one of {ADAPT_KINDS}")
        if self.steepness < 1:
            raise ConfigError("steepness must be a positive integer")
        if self.queue_limit is not None and self.queue_limit < 1:
            raise ConfigError("queue limit must be positive (or None for unlimited)")
        if self.extra_depth < 0:
            raise ConfigError("extra depth must be nonnegative")
        if self.max_depth < 2:
            raise ConfigError("max depth must be at least 2")
        if self.order not in ("lex", "freq"):
            raise ConfigError("order must be 'lex' or 'freq'")

    def orderings_for(self, log: EventLog) -> ActivityOrderings:
        if self.order == "freq":
            return ActivityOrderings.frequency(log)
        return ActivityOrderings.lexicographic(log.alphabet)

    def as_dict(self) -> dict:
        return {
            "tau": str(self.tau),
            "delta": str(self.delta),
            "metric": self.metric,
            "adapt": self.adapt,
            "steepness": self.steepness,
            "queue_limit": self.queue_limit,
            "extra_depth": self.extra_depth,
            "max_depth": self.max_depth,
            "order": self.order,
        }


def adapt_delta(kind: str, delta: Fraction, place_size: int, depth: int,
                d_max: int, steepness: int):
    """Per-place cap on sacrificed traces, shaped by place complexity vs. tree depth.

    Returns 1 for noDelta, delta for constant; linear/sigmoid scale delta by a
    modifier that is 0 when the place comes from the current level and grows
    as the traversal outpaces the place's complexity. Linear results are
    clamped to [0, delta]; the sigmoid modifier lies in [0, 1) by shape.
    """
    if kind == "noDelta":
        return Fraction(1)
    if kind == "constant":
        return delta
    if kind == "linear":
        modifier = (Fraction(steepness, place_size)
                    * Fraction(depth - place_size, d_max - 2))
        return min(max(delta * modifier, Fraction(0)), delta)
    if kind == "sigmoid":
        exponent = -(steepness / place_size) * (depth - place_size)
        modifier = 2.0 / (1.0 + math.exp(exponent)) - 1.0
        return delta * max(modifier, 0.0)
    raise ConfigError(f"unknown delta adaption kind {kind!r}")


def keep(current_weight_of_intersection: int, tau: Fraction, total: int) -> bool:
    return current_weight_of_intersection >= tau * total


def add(current_weight: int, intersection_weight: int, adapted_delta, total: int) -> bool:
    return current_weight - intersection_weight <= adapted_delta * total


@dataclass(frozen=True)
class QueueEntry:
    place: Place
    fit_mask: int
    fit_weight: int
    sort_key: tuple

    def __lt__(self, other: "QueueEntry") -> bool:
        return self.sort_key < other.sort_key


class PotentialQueue:
    """Bounded, deterministically ordered buffer of deferred fitting places.

    Ordered by place complexity ascending, then replayable-trace count
    descending, then rank tuples of (I, O) under the tree orderings.
    Overflow evicts the worst-ranked entry.
    """

    def __init__(self, limit: int | None, orderings: ActivityOrderings):
        self.limit = limit
        self._in_rank = orderings.in_rank()
        self._out_rank = orderings.out_rank()
        self._entries: list[QueueEntry] = []

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(list(self._entries))

    def _key(self, place: Place, fit_weight: int) -> tuple:
        return (
            place.size,
            -fit_weight,
            tuple(sorted(self._in_rank[a] for a in place.ingoing)),
            tuple(sorted(self._out_rank[a] for a in place.outgoing)),
        )

    def push(self, place: Place, fit_mask: int, fit_weight: int) -> QueueEntry | None:
        """Insert keeping order; returns the evicted entry on overflow, if any."""
        entry = QueueEntry(place, fit_mask, fit_weight, self._key(place, fit_weight))
        insort(self._entries, entry)
        if self.limit is not None and len(self._entries) > self.limit:
            return self._entries.pop()
        return None

    def remove(self, entry: QueueEntry):
        self._entries.remove(entry)


@dataclass
class SelectionResult:
    accepted: list[Place]
    trace: list[dict]
    stats: TraversalStats
    fitting_mask: int
    selection_seconds: float
    evaluator: Evaluator
    orderings: ActivityOrderings

    @property
    def replayable(self) -> int:
        return self.evaluator.weight(self.fitting_mask)


def run_selection(log: EventLog, config: DiscoveryConfig,
                  evaluator: Evaluator | None = None) -> SelectionResult:
    """Drive the pruned BFS and select the accepted place set.

    Every decision (accept / queue / discard / evict) is recorded in the
    selection trace. Queue drains happen on each level change, once after
    traversal, and extra_depth more times with the artificial depth growing
    by one per pass (capped at d_max = 2|A|).
    """
    config.validate()
    if evaluator is None:
        evaluator = Evaluator(log)
    orderings = config.orderings_for(log)
    d_max = 2 * len(log.alphabet)
    total = log.total

    queue = PotentialQueue(config.queue_limit, orderings)
    accepted: list[Place] = []
    trace: list[dict] = []
    state = {"mask": evaluator.full_mask, "selection_seconds": 0.0}

    def record(place: Place, decision: str, depth: int, adapted=None):
        trace.append({
            "place": str(place),
            "decision": decision,
            "depth": depth,
            "adapted_delta": None if adapted is None else float(adapted),
            "replayable_after": evaluator.weight(state["mask"]),
        })

    def consider(place: Place, fit_mask: int, fit_weight: int, depth: int) -> str:
        """keep/add classification against the current net; accepts mutate state."""
        intersection = state["mask"] & fit_mask
        inter_weight = evaluator.weight(intersection)
        if not keep(inter_weight, config.tau, total):
            return "discard"
        adapted = adapt_delta(config.adapt, config.delta, place.size, depth,
                              d_max, config.steepness)
        current_weight = evaluator.weight(state["mask"])
        if add(current_weight, inter_weight, adapted, total):
            state["mask"] = intersection
            accepted.append(place)
            record(place, "accept", depth, adapted)
            return "accept"
        return "queue"

    def on_fitting(place: Place, verdict: PlaceVerdict, depth: int):
        t0 = time.perf_counter()
        fit_mask = evaluator.fitting_mask(place)
        fit_weight = evaluator.weight(fit_mask)
        outcome = consider(place, fit_mask, fit_weight, depth)
        if outcome == "discard":
            record(place, "discard", depth)
        elif outcome == "queue":
            adapted = adapt_delta(config.adapt, config.delta, place.size, depth,
                                  d_max, config.steepness)
            record(place, "queue", depth, adapted)
            evicted = queue.push(place, fit_mask, fit_weight)
            if evicted is not None:
                record(evicted.place, "evict", depth)
        state["selection_seconds"] += time.perf_counter() - t0

    def drain(depth: int):
        t0 = time.perf_counter()
        for entry in list(queue):
            outcome = consider(entry.place, entry.fit_mask, entry.fit_weight, depth)
            if outcome == "accept":
                queue.remove(entry)
            elif outcome == "discard":
                queue.remove(entry)
                record(entry.place, "discard", depth)
        state["selection_seconds"] += time.perf_counter() - t0

    def evaluate(place: Place, _depth: int) -> PlaceVerdict:
        return evaluator.classify(place, config.tau, config.metric)

    stats = bfs_traverse(log.alphabet, orderings, config.max_depth, evaluate,
                         on_fitting=on_fitting, on_level_change=drain)
    drain(min(config.max_depth, d_max))
    for extra in range(1, config.extra_depth + 1):
        drain(min(config.max_depth + extra, d_max))

    return SelectionResult(accepted, trace, stats, state["mask"],
                           state["selection_seconds"], evaluator, orderings)
