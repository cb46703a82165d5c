"""Shared fixtures: the worked example logs/nets and a seeded random-log factory."""

import random

import pytest

from placeminer import END, START, EventLog, PetriNet, Place


def normalized_log(bodies_with_counts):
    """Build a normalized log from (body, count) pairs of user-activity tuples."""
    variants = {}
    for body, count in bodies_with_counts:
        variants[(START,) + tuple(body) + (END,)] = count
    return EventLog(variants)


@pytest.fixture
def fig3_log():
    """Two-variant log whose naive all-places net deadlocks completely."""
    return normalized_log([(("a", "b"), 40), (("b", "a"), 60)])


FIG3_PLACES = [
    Place({START}, {"a"}),
    Place({START}, {"b"}),
    Place({"a"}, {END}),
    Place({"b"}, {END}),
    Place({"a"}, {"b"}),
    Place({"b"}, {"a"}),
]


@pytest.fixture
def fig3_places():
    return list(FIG3_PLACES)


@pytest.fixture
def fig7_log():
    """Log with the infrequent but well-positioned activity e."""
    return normalized_log([
        (("a", "b", "c", "d"), 35),
        (("a", "b", "c", "e"), 5),
        (("b", "a", "c", "d"), 55),
        (("b", "a", "c", "e"), 5),
    ])


@pytest.fixture
def fig8_log():
    """Four-variant log used by the selection walkthrough (100 traces)."""
    return normalized_log([
        (("a", "b", "c", "e"), 60),
        (("a", "b", "d"), 20),
        (("a", "c", "b", "e"), 15),
        (("a", "b", "d", "e"), 5),
    ])


FIG8_PLACES = {
    "p1": Place({START}, {"a"}),
    "p2": Place({"a"}, {"c"}),
    "p3": Place({"a"}, {"b"}),
    "p4": Place({"c"}, {"e"}),
    "p5": Place({"b"}, {"e"}),
    "p6": Place({"e"}, {END}),
    "p7": Place({"b"}, {"c", "d"}),
    "p8": Place({"d", "e"}, {END}),
}


@pytest.fixture
def fig8_places():
    return dict(FIG8_PLACES)


@pytest.fixture
def l1_log():
    """First half of the metric counterexample (raw traces, no endpoints)."""
    return EventLog({("a", "b"): 90, ("x", "y"): 20, ("c",): 10})


@pytest.fixture
def l2_log():
    return EventLog({("a", "b", "a", "c"): 33, ("x",): 1, ("b",): 33, ("c",): 33})


@pytest.fixture
def classification_log():
    """Log of the four-way classification example (tau = 0.5)."""
    return normalized_log([(("a", "b", "d"), 60), (("a", "c", "d"), 40)])


def example_net() -> PetriNet:
    """The quality-metric example: start then a alone, or b and c in either order."""
    return PetriNet(
        activities=frozenset({START, "a", "b", "c", END}),
        places=frozenset({
            Place({START}, {"a", "b"}),
            Place({START}, {"a", "c"}),
            Place({"a", "b"}, {END}),
            Place({"a", "c"}, {END}),
        }),
    )


@pytest.fixture
def quality_net():
    return example_net()


@pytest.fixture
def quality_log_two_traces():
    return normalized_log([(("a",), 1), (("c", "b"), 1)])


@pytest.fixture
def quality_log_three_traces():
    return normalized_log([(("a",), 1), (("c", "b"), 1), (("d", "e", "d", "e", "a"), 1)])


def random_log(seed: int, max_user_activities: int = 4, max_variants: int = 50,
               max_body: int = 6) -> EventLog:
    """Seeded random normalized log; alphabet is exactly the activities used."""
    rng = random.Random(seed)
    user = [chr(ord("a") + i) for i in range(rng.randint(1, max_user_activities))]
    variant_count = rng.randint(1, max_variants)
    variants = {}
    for _ in range(variant_count):
        body = tuple(rng.choice(user) for _ in range(rng.randint(0, max_body)))
        trace = (START,) + body + (END,)
        variants[trace] = variants.get(trace, 0) + rng.randint(1, 20)
    return EventLog(variants)


@pytest.fixture
def random_log_factory():
    return random_log
