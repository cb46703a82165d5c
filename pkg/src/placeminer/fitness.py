"""Place fitness metrics and log-level place classification.

Scores are exact rationals over integer trace counts and are compared
exactly against thresholds, so behavior at boundaries like tau = 0.75 never
depends on float rounding. The Evaluator memoizes replay verdicts per
(place, log) as variant bitmasks, which keeps candidate evaluation cheap
when many thresholds/metrics are scored against one log.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import DomainError
from .eventlog import EventLog
from .petri import Place

METRICS = ("absolute", "relative", "aggregated", "combined")


class Status(Enum):
    FITTING = "fitting"
    UNDERFED = "underfed"
    OVERFED = "overfed"
    UNDERFED_AND_OVERFED = "underfed_and_overfed"
    PLAIN_UNFITTING = "plain_unfitting"


@dataclass(frozen=True)
class PlaceVerdict:
    """Log-level classification of a place under one metric and threshold."""

    score: Fraction
    status: Status
    sub_scores: dict | None = None

    @property
    def fitting(self) -> bool:
        return self.status is Status.FITTING

    @property
    def underfed(self) -> bool:
        return self.status in (Status.UNDERFED, Status.UNDERFED_AND_OVERFED)

    @property
    def overfed(self) -> bool:
        return self.status in (Status.OVERFED, Status.UNDERFED_AND_OVERFED)


class Evaluator:
    """Replay/metric cache for one event log.

    Trace multisets are represented as bitmasks over the log's variant list;
    multiset intersection is bitwise AND and sizes are count-weighted popcounts.
    """

    def __init__(self, log: EventLog):
        self.log = log
        self.variants = [trace for trace, _ in log.variants]
        self.counts = [count for _, count in log.variants]
        self.total = log.total
        self.full_mask = (1 << len(self.variants)) - 1
        self.act_masks: dict[str, int] = {a: 0 for a in log.alphabet}
        for index, trace in enumerate(self.variants):
            bit = 1 << index
            for activity in set(trace):
                self.act_masks[activity] |= bit
        self._act_weights = {a: self.weight(m) for a, m in self.act_masks.items()}
        self._replay: dict[tuple[frozenset, frozenset], tuple[int, int, int]] = {}
        self._scores: dict[tuple, Fraction] = {}

    def weight(self, mask: int) -> int:
        """Count-weighted size of a variant bitmask."""
        total = 0
        counts = self.counts
        while mask:
            low = mask & -mask
            total += counts[low.bit_length() - 1]
            mask ^= low
        return total

    def act_mask(self, activities) -> int:
        mask = 0
        for activity in activities:
            mask |= self.act_masks[activity]
        return mask

    def replay_masks(self, place: Place) -> tuple[int, int, int]:
        """(fitting, underfed, overfed) bitmasks of the place over the log."""
        key = (place.ingoing, place.outgoing)
        cached = self._replay.get(key)
        if cached is not None:
            return cached
        ingoing = place.ingoing
        outgoing = place.outgoing
        fit = under = over = 0
        for index, trace in enumerate(self.variants):
            tokens = 0
            missing = False
            for activity in trace:
                if activity in outgoing:
                    if tokens:
                        tokens -= 1
                    else:
                        missing = True
                if activity in ingoing:
                    tokens += 1
            bit = 1 << index
            if missing:
                under |= bit
            if tokens:
                over |= bit
            if not missing and not tokens:
                fit |= bit
        result = (fit, under, over)
        self._replay[key] = result
        return result

    def fitting_mask(self, place: Place) -> int:
        return self.replay_masks(place)[0]

    # -- metric scores ----------------------------------------------------

    def score(self, place: Place, metric: str) -> Fraction:
        key = (place.ingoing, place.outgoing, metric)
        cached = self._scores.get(key)
        if cached is not None:
            return cached
        if metric == "absolute":
            value = self._absolute(place)
        elif metric == "relative":
            value = self._relative(place)
        elif metric == "aggregated":
            value = self._aggregated(place)
        elif metric == "combined":
            # Relative <= absolute always holds, so the minimum over all three
            # reduces to min(relative, aggregated).
            value = min(self._relative(place), self._aggregated(place))
        else:
            raise DomainError(f"unknown fitness metric {metric!r}")
        self._scores[key] = value
        return value

    def _absolute(self, place: Place) -> Fraction:
        fit, _, _ = self.replay_masks(place)
        return Fraction(self.weight(fit), self.total)

    def _relative(self, place: Place) -> Fraction:
        fit, _, _ = self.replay_masks(place)
        act = self.act_mask(place.ingoing | place.outgoing)
        act_weight = self.weight(act)
        if act_weight == 0:
            raise DomainError(
                f"place {place} activates no trace; relative fitness is undefined")
        return Fraction(self.weight(fit & act), act_weight)

    def _aggregated(self, place: Place) -> Fraction:
        fit, _, _ = self.replay_masks(place)
        best = None
        for activity in place.ingoing | place.outgoing:
            act = self.act_masks.get(activity, 0)
            act_weight = self._act_weights.get(activity, 0)
            if act_weight == 0:
                raise DomainError(
                    f"activity {activity!r} never occurs in the log; "
                    "aggregated fitness is undefined")
            share = Fraction(self.weight(fit & act), act_weight)
            if best is None or share < best:
                best = share
        return best

    def sub_scores(self, place: Place) -> dict[str, Fraction]:
        return {
            "absolute": self.score(place, "absolute"),
            "relative": self.score(place, "relative"),
            "aggregated": self.score(place, "aggregated"),
        }

    # -- log-level flags ---------------------------------------------------

    def log_flags(self, place: Place, metric: str, tau: Fraction) -> tuple[bool, bool]:
        """(underfed, overfed) flags driving subtree skipping; strict > at the 1-tau boundary."""
        bound = 1 - tau
        _, under, over = self.replay_masks(place)
        if metric == "absolute":
            return (Fraction(self.weight(under), self.total) > bound,
                    Fraction(self.weight(over), self.total) > bound)
        if metric == "relative":
            act = self.act_mask(place.ingoing | place.outgoing)
            act_weight = self.weight(act)
            return (Fraction(self.weight(under & act), act_weight) > bound,
                    Fraction(self.weight(over & act), act_weight) > bound)
        if metric == "aggregated":
            underfed = overfed = False
            for activity in place.ingoing | place.outgoing:
                act = self.act_masks[activity]
                act_weight = self._act_weights[activity]
                if not underfed and Fraction(self.weight(under & act), act_weight) > bound:
                    underfed = True
                if not overfed and Fraction(self.weight(over & act), act_weight) > bound:
                    overfed = True
                if underfed and overfed:
                    break
            return underfed, overfed
        if metric == "combined":
            # Each constituent clause is individually monotone, so their
            # disjunction is a sound skip signal for the combined metric.
            rel_under, rel_over = self.log_flags(place, "relative", tau)
            agg_under, agg_over = self.log_flags(place, "aggregated", tau)
            return rel_under or agg_under, rel_over or agg_over
        raise DomainError(f"unknown fitness metric {metric!r}")

    def classify(self, place: Place, tau: Fraction, metric: str) -> PlaceVerdict:
        score = self.score(place, metric)
        sub = self.sub_scores(place) if metric == "combined" else None
        if score >= tau:
            return PlaceVerdict(score, Status.FITTING, sub)
        underfed, overfed = self.log_flags(place, metric, tau)
        if underfed and overfed:
            status = Status.UNDERFED_AND_OVERFED
        elif underfed:
            status = Status.UNDERFED
        elif overfed:
            status = Status.OVERFED
        else:
            status = Status.PLAIN_UNFITTING
        return PlaceVerdict(score, status, sub)


def _check_log(log: EventLog):
    if log.total == 0:
        raise DomainError("fitness metrics are undefined on an empty log")


def fitness_absolute(place: Place, log: EventLog) -> Fraction:
    _check_log(log)
    return Evaluator(log).score(place, "absolute")


def fitness_relative(place: Place, log: EventLog) -> Fraction:
    _check_log(log)
    return Evaluator(log).score(place, "relative")


def fitness_aggregated(place: Place, log: EventLog) -> Fraction:
    _check_log(log)
    return Evaluator(log).score(place, "aggregated")


def fitness_combined(place: Place, log: EventLog) -> tuple[Fraction, dict[str, Fraction]]:
    _check_log(log)
    evaluator = Evaluator(log)
    return evaluator.score(place, "combined"), evaluator.sub_scores(place)


def classify(place: Place, log: EventLog, tau: Fraction, metric: str) -> PlaceVerdict:
    if not 0 <= tau <= 1:
        raise DomainError("tau must lie in [0, 1]")
    return Evaluator(log).classify(place, tau, metric)
