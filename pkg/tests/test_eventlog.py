import io
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from placeminer import END, START, EventLog, activated, augment_endpoints, parse_csv, parse_xes
from placeminer.errors import ConfigError, DomainError, IngestionError, LogParseError

XES_TWO_EQUAL = b"""<?xml version="1.0" encoding="UTF-8"?>
<log xmlns="http://www.xes-standard.org/">
  <trace>
    <event><string key="concept:name" value="a"/></event>
    <event><string key="concept:name" value="b"/></event>
  </trace>
  <trace>
    <event><string key="concept:name" value="a"/></event>
    <event><string key="concept:name" value="b"/></event>
  </trace>
</log>
"""


def xes_for(traces):
    parts = ['<?xml version="1.0"?><log>']
    for trace in traces:
        parts.append("<trace>")
        for activity in trace:
            parts.append(f'<event><string key="concept:name" value="{activity}"/></event>')
        parts.append("</trace>")
    parts.append("</log>")
    return "".join(parts).encode()


class TestParseXes:
    def test_identical_traces_aggregate(self):
        log = parse_xes(XES_TWO_EQUAL)
        assert log.variants == ((("a", "b"), 2),)
        assert log.total == 2

    def test_singleton_traces(self):
        log = parse_xes(xes_for([("a",), ("b",)]))
        assert log.as_counter() == Counter({("a",): 1, ("b",): 1})
        assert log.alphabet == {"a", "b"}

    def test_event_without_name_is_located(self):
        bad = b'<log><trace><event><string key="other" value="x"/></event></trace></log>'
        with pytest.raises(LogParseError, match="event 0 of trace 0"):
            parse_xes(bad)

    def test_malformed_xml_reports_position(self):
        with pytest.raises(LogParseError, match=r"line \d+, column \d+"):
            parse_xes(b"<log><trace></log>")

    def test_empty_trace_rejected_with_index(self):
        with pytest.raises(LogParseError, match="trace 1"):
            parse_xes(xes_for([("a",), ()]))

    def test_ingestion_lossless_up_to_aggregation(self):
        traces = [("a", "b"), ("a",), ("a", "b"), ("c",), ("a",)]
        log = parse_xes(xes_for(traces))
        assert log.total == len(traces)


CSV_BASIC = "case,activity,order\nc1,a,1\nc1,b,2\nc2,a,1\n"


class TestParseCsv:
    def test_grouping(self):
        log = parse_csv(CSV_BASIC.encode(), "case", "activity", "order")
        assert log.as_counter() == Counter({("a", "b"): 1, ("a",): 1})

    def test_order_column_wins_over_file_order(self):
        shuffled = "case,activity,order\nc1,b,2\nc2,a,1\nc1,a,1\n"
        assert (parse_csv(shuffled.encode(), "case", "activity", "order")
                == parse_csv(CSV_BASIC.encode(), "case", "activity", "order"))

    def test_missing_column(self):
        with pytest.raises(ConfigError, match="'timestamp'"):
            parse_csv(CSV_BASIC.encode(), "case", "activity", "timestamp")

    def test_duplicate_case_order_names_case(self):
        dup = "case,activity,order\nc1,a,1\nc1,b,1\n"
        with pytest.raises(IngestionError, match="c1"):
            parse_csv(dup.encode(), "case", "activity", "order")

    def test_numeric_order_sorts_numerically(self):
        log = parse_csv(b"case,activity,order\nc1,b,10\nc1,a,9\n",
                        "case", "activity", "order")
        assert log.variants == ((("a", "b"), 1),)


class TestAugmentEndpoints:
    def test_wraps_traces(self):
        log = EventLog({("a", "b"): 1})
        assert augment_endpoints(log).variants == (((START, "a", "b", END), 1),)

    def test_empty_trace_becomes_start_end(self):
        log = EventLog({(): 1})
        assert augment_endpoints(log).variants == (((START, END), 1),)

    def test_reserved_label_escaped_before_augmentation(self):
        log = EventLog({(START, "a"): 1})
        augmented = augment_endpoints(log)
        (trace, _), = augmented.variants
        assert trace[0] == START and trace[-1] == END
        assert sum(1 for a in trace if a == START) == 1
        assert "%" + START in augmented.alphabet

    def test_idempotent(self):
        log = augment_endpoints(EventLog({("a",): 2, (): 1}))
        assert augment_endpoints(log) == log

    def test_normalization_invariant(self):
        log = augment_endpoints(EventLog({("a", "b"): 1, ("b",): 2}))
        assert log.is_normalized()


class TestActivated:
    def test_counterexample_count(self, l1_log):
        assert sum(activated(l1_log, {"c"}).values()) == 10

    def test_empty_set(self, l1_log):
        assert activated(l1_log, set()) == Counter()

    def test_full_alphabet_is_whole_log(self, l1_log):
        assert activated(l1_log, l1_log.alphabet) == l1_log.as_counter()

    def test_unknown_activity_rejected(self, l1_log):
        with pytest.raises(DomainError):
            activated(l1_log, {"zz"})

    def test_union_is_multiset_max_union(self, l2_log):
        left = activated(l2_log, {"a"})
        right = activated(l2_log, {"b"})
        assert activated(l2_log, {"a", "b"}) == left | right


class TestCanonicalJson:
    def test_round_trip(self, fig8_log):
        assert EventLog.from_canonical_json(fig8_log.to_canonical_json()) == fig8_log

    def test_digest_stable(self, fig8_log):
        assert fig8_log.digest() == fig8_log.digest()
        reordered = EventLog(dict(reversed(fig8_log.variants)))
        assert reordered.digest() == fig8_log.digest()

    def test_empty_log_rejected(self):
        with pytest.raises(DomainError):
            EventLog({})


@given(st.lists(st.lists(st.sampled_from("abcd"), max_size=5), min_size=1, max_size=20))
@settings(max_examples=60, deadline=None)
def test_variant_counts_sum_to_input_size(traces):
    log = EventLog.from_traces(tuple(t) for t in traces)
    assert log.total == len(traces)


@given(st.lists(st.lists(st.sampled_from("abcd"), max_size=5), min_size=1, max_size=20))
@settings(max_examples=60, deadline=None)
def test_augment_idempotent_property(traces):
    log = augment_endpoints(EventLog.from_traces(tuple(t) for t in traces))
    assert augment_endpoints(log) == log


@given(
    st.lists(st.lists(st.sampled_from("abcd"), min_size=1, max_size=5), min_size=1, max_size=20),
    st.sets(st.sampled_from("abcd")),
    st.sets(st.sampled_from("abcd")),
)
@settings(max_examples=60, deadline=None)
def test_activated_union_property(traces, left, right):
    log = EventLog.from_traces(tuple(t) for t in traces)
    left &= log.alphabet
    right &= log.alphabet
    assert activated(log, left | right) == activated(log, left) | activated(log, right)
