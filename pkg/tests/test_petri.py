from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from placeminer import (END, START, EventLog, Marking, PetriNet, Place,
                        classify_log, enabled_transitions, net_fitting, replay_trace)
from placeminer.errors import DomainError
from tests.conftest import FIG8_PLACES, example_net


class TestReplayTrace:
    # The un-normalized probe trace from the replay walkthrough.
    TRACE = ("b", START, "a", END)

    def test_underfed_example(self):
        verdict = replay_trace(Place({START}, {"a", "b"}), self.TRACE)
        assert verdict.underfed and not verdict.fitting

    def test_fitting_example(self):
        assert replay_trace(Place({START}, {"a", "c"}), self.TRACE).fitting

    def test_overfed_example(self):
        verdict = replay_trace(Place({"a", "b"}, {END}), self.TRACE)
        assert verdict.overfed and not verdict.fitting

    def test_flags_consistent(self):
        for place in FIG8_PLACES.values():
            verdict = replay_trace(place, (START, "a", "b", "c", "e", END))
            assert verdict.fitting == (not verdict.underfed and not verdict.overfed)

    def test_order_sensitivity(self):
        place = Place({"a"}, {"b"})
        assert replay_trace(place, (START, "a", "b", END)).fitting
        assert not replay_trace(place, (START, "b", "a", END)).fitting

    def test_self_loop_consumes_first(self):
        verdict = replay_trace(Place({"a"}, {"a"}), (START, "a", END))
        assert verdict.underfed

    def test_transparent_activities(self):
        assert replay_trace(Place({"x"}, {"y"}), (START, "a", "b", END)).fitting

    def test_empty_sides_rejected(self):
        with pytest.raises(DomainError):
            Place(set(), {"a"})
        with pytest.raises(DomainError):
            Place({"a"}, set())


FIG8_EXPECTED_FITTING = {
    # variant index per place, from the walkthrough table (v1..v4 in log order
    # 60/20/15/5)
    "p1": {0, 1, 2, 3},
    "p2": {0, 2},
    "p3": {0, 1, 2, 3},
    "p4": {0, 1, 2},
    "p5": {0, 2, 3},
    "p6": {0, 2, 3},
    "p7": {0, 1, 3},
    "p8": {0, 1, 2},
}


class TestClassifyLog:
    @pytest.mark.parametrize("name", sorted(FIG8_PLACES))
    def test_walkthrough_table(self, fig8_log, name):
        order = [
            (START, "a", "b", "c", "e", END),
            (START, "a", "b", "d", END),
            (START, "a", "c", "b", "e", END),
            (START, "a", "b", "d", "e", END),
        ]
        fitting, underfed, overfed = classify_log(FIG8_PLACES[name], fig8_log)
        got = {order.index(trace) for trace in fitting}
        assert got == FIG8_EXPECTED_FITTING[name]
        assert sum(fitting.values()) + sum((underfed | overfed).values()) == fig8_log.total

    def test_p2_fits_75(self, fig8_log):
        fitting, _, _ = classify_log(FIG8_PLACES["p2"], fig8_log)
        assert sum(fitting.values()) == 75

    def test_p8_unfits_exactly_variant_4(self, fig8_log):
        fitting, underfed, overfed = classify_log(FIG8_PLACES["p8"], fig8_log)
        unfitting = underfed | overfed
        assert sum(unfitting.values()) == 5
        assert set(unfitting) == {(START, "a", "b", "d", "e", END)}


class TestNetFitting:
    def test_fig8_all_places_replay_only_variant_one(self, fig8_log):
        result = net_fitting(FIG8_PLACES.values(), fig8_log)
        assert sum(result.values()) == 60
        assert set(result) == {(START, "a", "b", "c", "e", END)}

    def test_fig3_all_places_deadlock(self, fig3_log, fig3_places):
        assert net_fitting(fig3_places, fig3_log) == Counter()

    def test_empty_place_set_returns_whole_log(self, fig3_log):
        assert net_fitting([], fig3_log) == fig3_log.as_counter()

    def test_adding_a_place_never_adds_behavior(self, fig8_log):
        places = []
        previous = net_fitting(places, fig8_log)
        for place in FIG8_PLACES.values():
            places.append(place)
            current = net_fitting(places, fig8_log)
            assert current <= previous
            previous = current


class TestEnabledTransitions:
    def test_initial_marking_enables_only_start(self):
        net = example_net()
        assert enabled_transitions(net, Marking.initial(net)) == {START}

    def test_after_start_enables_abc(self):
        net = example_net()
        marking = Marking.initial(net)
        marking.source = 0
        for place in net.places:
            if START in place.ingoing:
                marking.tokens[place] = 1
        assert enabled_transitions(net, marking) == {"a", "b", "c"}

    def test_placeless_net_enables_everything(self):
        net = PetriNet(frozenset({START, "a", END}), frozenset())
        assert enabled_transitions(net, Marking.initial(net)) == {START, "a", END}


@given(st.lists(st.sampled_from(["a", "b", "c"]), max_size=8),
       st.sets(st.sampled_from(["a", "b", "c"]), min_size=1),
       st.sets(st.sampled_from(["a", "b", "c"]), min_size=1))
@settings(max_examples=150, deadline=None)
def test_verdict_flag_invariant(body, ingoing, outgoing):
    verdict = replay_trace(Place(ingoing, outgoing), (START,) + tuple(body) + (END,))
    assert verdict.fitting == (not verdict.underfed and not verdict.overfed)


@given(st.lists(st.lists(st.sampled_from(["a", "b"]), max_size=4), min_size=1, max_size=6))
@settings(max_examples=80, deadline=None)
def test_net_fitting_is_monotone_in_places(bodies):
    log = EventLog.from_traces((START,) + tuple(b) + (END,) for b in bodies)
    smaller = net_fitting([Place({"a"}, {"b"})], log)
    larger = net_fitting([Place({"a"}, {"b"}), Place({START}, {"a"})], log)
    assert larger <= smaller
