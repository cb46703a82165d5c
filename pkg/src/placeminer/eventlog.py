"""Event-log ingestion, normalization and trace-multiset operations.

A log is a multiset of traces; identical activity sequences are aggregated
into (variant, count) pairs at ingestion time and all downstream multiset
math is count-weighted over variants.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import xml.etree.ElementTree as ET
from collections import Counter
from typing import Iterable, Mapping

from .errors import ConfigError, DomainError, IngestionError, LogParseError

Trace = tuple[str, ...]

#: Reserved labels added by :func:`augment_endpoints`. User labels colliding
#: with them are escaped by prefixing, never merged.
START = "▶"  # ▶
END = "■"  # ■

_ESCAPE_PREFIX = "%"


class EventLog:
    """Immutable multiset of traces over the alphabet of activities they use."""

    __slots__ = ("_variants", "_alphabet", "_total")

    def __init__(self, variants: Mapping[Trace, int]):
        items = []
        for trace, count in variants.items():
            trace = tuple(trace)
            if not isinstance(count, int) or count <= 0:
                raise DomainError(f"variant count for {trace!r} must be a positive integer")
            for a in trace:
                if not a:
                    raise DomainError("activity names must be non-empty")
            items.append((trace, count))
        if not items:
            raise DomainError("an event log must contain at least one trace")
        items.sort(key=lambda item: item[0])
        self._variants: tuple[tuple[Trace, int], ...] = tuple(items)
        self._alphabet = frozenset(a for trace, _ in items for a in trace)
        self._total = sum(count for _, count in items)

    @classmethod
    def from_traces(cls, traces: Iterable[Iterable[str]]) -> "EventLog":
        return cls(Counter(tuple(t) for t in traces))

    @property
    def alphabet(self) -> frozenset[str]:
        return self._alphabet

    @property
    def variants(self) -> tuple[tuple[Trace, int], ...]:
        return self._variants

    @property
    def total(self) -> int:
        """Number of traces |L| counting multiplicity."""
        return self._total

    def count(self, trace: Trace) -> int:
        for variant, n in self._variants:
            if variant == trace:
                return n
        return 0

    def as_counter(self) -> Counter[Trace]:
        return Counter(dict(self._variants))

    def __eq__(self, other) -> bool:
        return isinstance(other, EventLog) and self._variants == other._variants

    def __hash__(self) -> int:
        return hash(self._variants)

    def __repr__(self) -> str:
        return f"EventLog({len(self._variants)} variants, {self._total} traces)"

    def is_normalized(self) -> bool:
        """True when every trace starts with START, ends with END, and neither occurs inside."""
        for trace, _ in self._variants:
            if len(trace) < 2 or trace[0] != START or trace[-1] != END:
                return False
            if any(a in (START, END) for a in trace[1:-1]):
                return False
        return True

    def to_canonical_json(self) -> bytes:
        payload = {
            "alphabet": sorted(self._alphabet),
            "variants": [
                {"sequence": list(trace), "count": count} for trace, count in self._variants
            ],
        }
        return json.dumps(payload, ensure_ascii=False, sort_keys=True,
                          separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_canonical_json(cls, data: bytes | str) -> "EventLog":
        payload = json.loads(data)
        variants = Counter()
        for entry in payload["variants"]:
            variants[tuple(entry["sequence"])] += int(entry["count"])
        log = cls(variants)
        declared = set(payload.get("alphabet", []))
        if declared and declared != set(log.alphabet):
            raise IngestionError("canonical JSON alphabet does not match its variants")
        return log

    def digest(self) -> str:
        return hashlib.sha256(self.to_canonical_json()).hexdigest()


def parse_xes(source) -> EventLog:
    """Parse the minimal XES profile: trace elements with events carrying concept:name.

    Lifecycle, timestamps and other attributes are ignored; event order follows
    document order.
    """
    data = _read_bytes(source)
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogParseError(f"malformed XES XML at line {line}, column {col}: {exc.msg}") from exc
    traces = []
    trace_elems = [el for el in root.iter() if _localname(el.tag) == "trace"]
    for trace_index, trace_el in enumerate(trace_elems):
        events = []
        event_elems = [el for el in trace_el if _localname(el.tag) == "event"]
        if not event_elems:
            raise LogParseError(f"trace {trace_index} contains no events")
        for event_index, event_el in enumerate(event_elems):
            name = None
            for attr in event_el:
                if attr.get("key") == "concept:name":
                    name = attr.get("value")
                    break
            if not name:
                raise LogParseError(
                    f"event {event_index} of trace {trace_index} has no concept:name")
            events.append(name)
        traces.append(tuple(events))
    if not traces:
        raise LogParseError("XES document contains no traces")
    return EventLog.from_traces(traces)


def parse_csv(source, case_column: str, activity_column: str, order_column: str) -> EventLog:
    """Parse a delimited event table: one row per event, grouped by case, sorted by order."""
    text = _read_bytes(source).decode("utf-8-sig")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise LogParseError("CSV input has no header row")
    for column in (case_column, activity_column, order_column):
        if column not in reader.fieldnames:
            raise ConfigError(
                f"column {column!r} not found in CSV header {list(reader.fieldnames)!r}")
    cases: dict[str, list[tuple[object, str]]] = {}
    seen_orders: dict[str, set] = {}
    for row_index, row in enumerate(reader, start=2):
        case = row[case_column]
        activity = row[activity_column]
        order = row[order_column]
        if case is None or activity is None or order is None:
            raise LogParseError(f"row {row_index} is missing a required value")
        key = _order_key(order)
        if key in seen_orders.setdefault(case, set()):
            raise IngestionError(f"duplicate (case, order) pair for case {case!r} at order {order!r}")
        seen_orders[case].add(key)
        cases.setdefault(case, []).append((key, activity))
    if not cases:
        raise LogParseError("CSV input contains no event rows")
    traces = []
    for case in sorted(cases):
        rows = sorted(cases[case], key=lambda item: item[0])
        traces.append(tuple(activity for _, activity in rows))
    return EventLog.from_traces(traces)


def _order_key(value: str):
    # Numeric order values sort numerically, everything else lexicographically;
    # the (tag, value) pair keeps mixed columns totally ordered.
    try:
        return (0, float(value))
    except (TypeError, ValueError):
        return (1, str(value))


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _read_bytes(source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        return source.encode("utf-8")
    if hasattr(source, "read"):
        data = source.read()
        return data if isinstance(data, bytes) else data.encode("utf-8")
    with open(source, "rb") as handle:
        return handle.read()


def escape_reserved_labels(log: EventLog) -> EventLog:
    """Prefix user labels that collide with the reserved start/end labels."""
    if START not in log.alphabet and END not in log.alphabet:
        return log
    taken = set(log.alphabet)
    renames = {}
    for label in (START, END):
        if label in log.alphabet:
            escaped = _ESCAPE_PREFIX + label
            while escaped in taken:
                escaped = _ESCAPE_PREFIX + escaped
            renames[label] = escaped
            taken.add(escaped)
    variants = Counter()
    for trace, count in log.variants:
        variants[tuple(renames.get(a, a) for a in trace)] += count
    return EventLog(variants)


def augment_endpoints(log: EventLog) -> EventLog:
    """Wrap every trace in the reserved start/end activities.

    Idempotent: an already-normalized log is returned unchanged. Reserved
    labels occurring as user activities are escaped first so the result has
    exactly one start and one end label per trace.
    """
    if log.is_normalized():
        return log
    log = escape_reserved_labels(log)
    variants = Counter()
    for trace, count in log.variants:
        variants[(START,) + trace + (END,)] += count
    return EventLog(variants)


def activated(log: EventLog, activities: Iterable[str]) -> Counter[Trace]:
    """Sub-multiset of traces containing at least one occurrence of any given activity."""
    wanted = frozenset(activities)
    unknown = wanted - log.alphabet
    if unknown:
        raise DomainError(f"activities outside the log alphabet: {sorted(unknown)}")
    result: Counter[Trace] = Counter()
    for trace, count in log.variants:
        if wanted and not wanted.isdisjoint(trace):
            result[trace] = count
    return result
