"""Petri nets over uniquely labeled transitions, and the token-replay engine.

Transitions are identified with activities, so a place is fully described by
its sets of ingoing and outgoing activities. Replay of a trace against a
place is a left-to-right token game: each event first consumes a token if
the activity is outgoing (a consumption from an empty place records a
missing token), then produces one if it is ingoing. Missing tokens mean the
place is underfed for the trace; leftover tokens at the end mean overfed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DomainError
from .eventlog import END, START, EventLog, Trace


@dataclass(frozen=True)
class Place:
    """A place identified by its nonempty ingoing/outgoing activity sets."""

    ingoing: frozenset[str]
    outgoing: frozenset[str]

    def __init__(self, ingoing: Iterable[str], outgoing: Iterable[str]):
        ingoing = frozenset(ingoing)
        outgoing = frozenset(outgoing)
        if not ingoing or not outgoing:
            raise DomainError("a place needs at least one ingoing and one outgoing activity")
        object.__setattr__(self, "ingoing", ingoing)
        object.__setattr__(self, "outgoing", outgoing)

    @property
    def size(self) -> int:
        return len(self.ingoing) + len(self.outgoing)

    def key(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (tuple(sorted(self.ingoing)), tuple(sorted(self.outgoing)))

    def __str__(self) -> str:
        return f"({','.join(sorted(self.ingoing))}|{','.join(sorted(self.outgoing))})"

    def __repr__(self) -> str:
        return f"Place{self!s}"


@dataclass(frozen=True)
class TraceVerdict:
    fitting: bool
    underfed: bool
    overfed: bool

    def __post_init__(self):
        assert self.fitting == (not self.underfed and not self.overfed)


def replay_trace(place: Place, trace: Trace) -> TraceVerdict:
    """Token game of one trace against one place; activities outside I and O are transparent."""
    ingoing = place.ingoing
    outgoing = place.outgoing
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
    overfed = tokens > 0
    return TraceVerdict(fitting=not missing and not overfed, underfed=missing, overfed=overfed)


def classify_log(place: Place, log: EventLog):
    """Variant-wise replay; returns the (fitting, underfed, overfed) trace multisets."""
    fitting: Counter[Trace] = Counter()
    underfed: Counter[Trace] = Counter()
    overfed: Counter[Trace] = Counter()
    for trace, count in log.variants:
        verdict = replay_trace(place, trace)
        if verdict.fitting:
            fitting[trace] = count
        if verdict.underfed:
            underfed[trace] = count
        if verdict.overfed:
            overfed[trace] = count
    return fitting, underfed, overfed


def net_fitting(places: Iterable[Place], log: EventLog) -> Counter[Trace]:
    """Multiset intersection of per-place fitting multisets (empty set of places: whole log)."""
    result: Counter[Trace] = Counter()
    places = tuple(places)
    for trace, count in log.variants:
        if all(replay_trace(place, trace).fitting for place in places):
            result[trace] = count
    return result


@dataclass(frozen=True)
class PetriNet:
    """Net restricted to uniquely labeled transitions plus a structural source and sink.

    The source (|start) and sink (end|) are not ordinary places: they are
    exempt from the nonempty-I/O rule and candidate math never sees them.
    """

    activities: frozenset[str]
    places: frozenset[Place]
    start: str = START
    end: str = END

    def __post_init__(self):
        if self.start not in self.activities or self.end not in self.activities:
            raise DomainError("net activities must include the start and end activities")
        for place in self.places:
            referenced = place.ingoing | place.outgoing
            if not referenced <= self.activities:
                raise DomainError(f"place {place} references activities outside the net")

    def sorted_places(self) -> list[Place]:
        return sorted(self.places, key=Place.key)

    def with_places(self, places: Iterable[Place]) -> "PetriNet":
        return PetriNet(self.activities, frozenset(places), self.start, self.end)


@dataclass
class Marking:
    """Token counts for every place plus the structural source and sink."""

    tokens: dict[Place, int] = field(default_factory=dict)
    source: int = 1
    sink: int = 0

    @classmethod
    def initial(cls, net: PetriNet) -> "Marking":
        return cls(tokens={place: 0 for place in net.sorted_places()}, source=1, sink=0)

    def copy(self) -> "Marking":
        return Marking(dict(self.tokens), self.source, self.sink)

    def as_tuple(self, place_order: list[Place]) -> tuple[int, ...]:
        return (self.source, self.sink) + tuple(self.tokens[p] for p in place_order)


def enabled_transitions(net: PetriNet, marking: Marking) -> set[str]:
    """Activities whose every ingoing place (source included for the start activity) has a token."""
    enabled = set()
    for activity in net.activities:
        if activity == net.start and marking.source < 1:
            continue
        if all(marking.tokens[place] >= 1
               for place in net.places if activity in place.outgoing):
            enabled.add(activity)
    return enabled


def fire(net: PetriNet, marking: Marking, activity: str) -> Marking:
    """Fire an enabled transition; caller guarantees enabledness."""
    new = marking.copy()
    if activity == net.start:
        new.source -= 1
    if activity == net.end:
        new.sink += 1
    for place in net.places:
        if activity in place.outgoing:
            new.tokens[place] -= 1
        if activity in place.ingoing:
            new.tokens[place] += 1
    return new


def replay_markings(net: PetriNet, trace: Trace) -> list[Marking]:
    """Markings visited while force-replaying a trace (valid for fitting traces)."""
    marking = Marking.initial(net)
    sequence = [marking]
    for activity in trace:
        marking = fire(net, marking, activity)
        sequence.append(marking)
    return sequence


def net_alphabet_counts(log: EventLog) -> Mapping[str, int]:
    """Occurrence count per activity, weighted by variant counts."""
    counts: Counter[str] = Counter()
    for trace, count in log.variants:
        for activity in trace:
            counts[activity] += count
    return counts
