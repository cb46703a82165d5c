import pytest

from placeminer import END, START, Evaluator, Place
from placeminer.candidates import (ActivityOrderings, CandidateNode, bfs_traverse,
                                   brute_force_fitting, children, collect_fitting,
                                   enumerate_candidates, level_count, roots,
                                   total_candidates, visited_upper_bound)
from placeminer.errors import BudgetError
from placeminer.selection import as_fraction
from tests.conftest import random_log


def alphabet_of(size: int) -> set[str]:
    user = [chr(ord("a") + i) for i in range(size - 2)]
    return {START, END, *user}


def full_tree_nodes(alphabet, orderings=None):
    """Closure of the children relation from the roots, counting generations."""
    if orderings is None:
        orderings = ActivityOrderings.lexicographic(alphabet)
    generated = {}
    frontier = roots(alphabet, orderings)
    for node in frontier:
        generated[node] = 1
    while frontier:
        next_frontier = []
        for node in frontier:
            for child in children(node, orderings):
                generated[child] = generated.get(child, 0) + 1
                next_frontier.append(child)
        frontier = next_frontier
    return generated


class TestRoots:
    def test_four_activity_alphabet_has_nine_roots(self):
        assert len(roots({START, "a", "b", END})) == 9

    def test_minimal_alphabet_has_single_root(self):
        (root,) = roots({START, END})
        assert root == CandidateNode((START,), (END,))

    @pytest.mark.parametrize("size", [2, 3, 4, 5, 6])
    def test_root_count_matches_square(self, size):
        assert len(roots(alphabet_of(size))) == (size - 1) ** 2


class TestChildren:
    def test_blue_child_exists_when_added_activity_is_greater(self):
        orderings = ActivityOrderings.lexicographic({START, "a", "b", END})
        node = CandidateNode(("a",), ("b",))
        kids = children(node, orderings)
        assert CandidateNode(("a",), ("b", END)) in kids

    def test_maximal_node_has_no_children(self):
        # START and END sort above every ASCII name, and neither may extend the
        # other side, so (START|END) is terminal under lexicographic orderings.
        orderings = ActivityOrderings.lexicographic({START, "a", END})
        assert children(CandidateNode((START,), (END,)), orderings) == []

    def test_input_extension_only_for_single_output(self):
        orderings = ActivityOrderings.lexicographic({START, "a", "b", END})
        wide = CandidateNode(("a",), ("a", "b"))
        assert all(child.ingoing == wide.ingoing for child in children(wide, orderings))

    @pytest.mark.parametrize("size", [2, 3, 4, 5])
    def test_every_candidate_generated_exactly_once(self, size):
        alphabet = alphabet_of(size)
        generated = full_tree_nodes(alphabet)
        assert all(count == 1 for count in generated.values())
        expected = {
            (tuple(sorted(p.ingoing)), tuple(sorted(p.outgoing)))
            for p in enumerate_candidates(alphabet, 2 * size)
        }
        got = {
            (tuple(sorted(n.ingoing)), tuple(sorted(n.outgoing)))
            for n in generated
        }
        assert got == expected


class TestCounts:
    def test_thirteen_activity_space(self):
        assert total_candidates(13) == 16_769_025

    @pytest.mark.parametrize("size", [2, 3, 4, 5, 6])
    def test_level_counts_match_enumeration(self, size):
        alphabet = alphabet_of(size)
        by_depth = {}
        for place in enumerate_candidates(alphabet, 2 * size):
            by_depth[place.size] = by_depth.get(place.size, 0) + 1
        for depth, expected in by_depth.items():
            assert level_count(size, depth) == expected
        assert sum(by_depth.values()) == total_candidates(size)

    @pytest.mark.parametrize("size", range(6, 15))
    def test_depth_five_levels_below_polynomial_bound(self, size):
        total = sum(level_count(size, depth) for depth in range(2, 6))
        assert total <= visited_upper_bound(size, 5)


def count_all_verdicts(log, tau, metric, d_cut=None):
    evaluator = Evaluator(log)
    orderings = ActivityOrderings.lexicographic(log.alphabet)
    if d_cut is None:
        d_cut = 2 * len(log.alphabet)
    return collect_fitting(evaluator, orderings, tau, metric, d_cut)


class TestBfsTraverse:
    def test_no_pruning_when_everything_fits(self):
        log = random_log(7)
        accepted, stats = count_all_verdicts(log, as_fraction(0), "absolute")
        size = len(log.alphabet)
        assert stats.skipped_underfed == 0 and stats.skipped_overfed == 0
        assert stats.visited == total_candidates(size)
        for depth, level in stats.levels.items():
            assert level.visited == level_count(size, depth)

    @pytest.mark.parametrize("seed", range(8))
    def test_partition_of_candidate_space(self, seed):
        log = random_log(seed, max_user_activities=3)
        accepted, stats = count_all_verdicts(log, as_fraction("0.7"), "absolute")
        assert stats.visited + stats.skipped == total_candidates(len(log.alphabet))

    def test_level_change_fires_in_order(self):
        log = random_log(11, max_user_activities=3)
        evaluator = Evaluator(log)
        orderings = ActivityOrderings.lexicographic(log.alphabet)
        seen = []
        bfs_traverse(log.alphabet, orderings, 4,
                     lambda p, d: evaluator.classify(p, as_fraction(0), "absolute"),
                     on_level_change=seen.append)
        assert seen == [3, 4]


class TestBruteForce:
    def test_guard_refuses_large_alphabets(self):
        from placeminer import EventLog

        body = tuple(chr(ord("a") + i) for i in range(11))
        log = EventLog({(START,) + body + (END,): 1})
        with pytest.raises(BudgetError):
            brute_force_fitting(log, as_fraction(1), "absolute", 4)

    def test_fig3_depth_two_fitting_set(self, fig3_log, fig3_places):
        fitting = brute_force_fitting(fig3_log, as_fraction("0.35"), "absolute", 2)
        assert set(fig3_places) <= set(fitting)

    def test_single_variant_tau_one(self):
        log = random_log(5, max_variants=1)
        fitting = brute_force_fitting(log, as_fraction(1), "absolute", 4)
        evaluator = Evaluator(log)
        for place in enumerate_candidates(log.alphabet, 4):
            assert (place in fitting) == (evaluator.score(place, "absolute") == 1)


@pytest.mark.parametrize("metric", ["absolute", "relative", "aggregated", "combined"])
@pytest.mark.parametrize("tau", ["0.3", "0.7", "1.0"])
def test_pruning_soundness_sample(metric, tau):
    log = random_log(42)
    accepted, _ = count_all_verdicts(log, as_fraction(tau), metric)
    oracle = brute_force_fitting(log, as_fraction(tau), metric, 2 * len(log.alphabet))
    assert set(accepted) == set(oracle)
    for place, verdict in accepted.items():
        assert verdict.score == oracle[place].score
