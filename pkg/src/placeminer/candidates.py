"""The complete candidate tree: generation, BFS with pruning, and the brute-force oracle.

Candidates are all places (I|O) with nonempty I not containing the end
activity and nonempty O not containing the start activity. Two total
orderings over the alphabet shape the tree: input extensions add an
activity greater than everything already in I and exist only while |O| = 1;
output extensions add an activity greater than everything already in O.
Every candidate is reachable from exactly one root by a unique path, so a
traversal visits each place once without materializing the tree.

Pruning uses the replay monotonicity of places: an underfed verdict closes
the whole output-extension subtree (such subtrees contain no input
extensions, so they are dropped outright and counted by closed form); an
overfed verdict propagates along input extensions, whose nodes skip
evaluation but still expand so their output extensions get evaluated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable

from .errors import BudgetError, DomainError
from .eventlog import END, START, EventLog
from .fitness import Evaluator, PlaceVerdict
from .petri import Place


@dataclass(frozen=True)
class ActivityOrderings:
    """Strict total orders over the alphabet for input and output extension."""

    in_order: tuple[str, ...]
    out_order: tuple[str, ...]

    def __post_init__(self):
        if set(self.in_order) != set(self.out_order):
            raise DomainError("input and output orderings must cover the same alphabet")
        if len(set(self.in_order)) != len(self.in_order):
            raise DomainError("orderings must be strict (no repeated activities)")

    @classmethod
    def lexicographic(cls, alphabet: Iterable[str]) -> "ActivityOrderings":
        order = tuple(sorted(alphabet))
        return cls(order, order)

    @classmethod
    def frequency(cls, log: EventLog) -> "ActivityOrderings":
        """Most frequent activities first, names breaking ties."""
        counts: dict[str, int] = {a: 0 for a in log.alphabet}
        for trace, count in log.variants:
            for activity in trace:
                counts[activity] += count
        order = tuple(sorted(log.alphabet, key=lambda a: (-counts[a], a)))
        return cls(order, order)

    def in_rank(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.in_order)}

    def out_rank(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.out_order)}


@dataclass(frozen=True)
class CandidateNode:
    """A candidate place as ordered activity tuples (ascending in the tree orderings)."""

    ingoing: tuple[str, ...]
    outgoing: tuple[str, ...]

    @property
    def depth(self) -> int:
        return len(self.ingoing) + len(self.outgoing)

    def place(self) -> Place:
        return Place(self.ingoing, self.outgoing)


@dataclass
class LevelStats:
    visited: int = 0
    skipped_underfed: int = 0
    skipped_overfed: int = 0


@dataclass
class TraversalStats:
    """Bookkeeping for one tree traversal; visited + skipped partitions the level sums."""

    visited: int = 0
    skipped_underfed: int = 0
    skipped_overfed: int = 0
    levels: dict[int, LevelStats] = field(default_factory=dict)
    generation_seconds: float = 0.0
    evaluation_seconds: float = 0.0

    def level(self, depth: int) -> LevelStats:
        if depth not in self.levels:
            self.levels[depth] = LevelStats()
        return self.levels[depth]

    @property
    def skipped(self) -> int:
        return self.skipped_underfed + self.skipped_overfed

    def as_dict(self) -> dict:
        return {
            "visited": self.visited,
            "skipped_underfed": self.skipped_underfed,
            "skipped_overfed": self.skipped_overfed,
            "levels": {
                str(depth): {
                    "visited": stats.visited,
                    "skipped_underfed": stats.skipped_underfed,
                    "skipped_overfed": stats.skipped_overfed,
                }
                for depth, stats in sorted(self.levels.items())
            },
        }


def level_count(alphabet_size: int, depth: int) -> int:
    """Number of candidates with |I| + |O| = depth over an alphabet of the given size."""
    n = alphabet_size - 1  # choices per side: no end in I, no start in O
    return sum(comb(n, i) * comb(n, depth - i)
               for i in range(max(1, depth - n), min(n, depth - 1) + 1))


def total_candidates(alphabet_size: int) -> int:
    """Size of the complete candidate space: nonempty I and O over n-1 allowed activities each."""
    return (2 ** (alphabet_size - 1) - 1) ** 2


def visited_upper_bound(alphabet_size: int, d_cut: int) -> int:
    """Polynomial bound on candidates up to a fixed depth."""
    return sum(comb(alphabet_size, i) * 2 ** i for i in range(2, d_cut + 1))


def roots(alphabet: Iterable[str], orderings: ActivityOrderings | None = None,
          start: str = START, end: str = END) -> list[CandidateNode]:
    """All (a|b) with a != end and b != start, in deterministic ordering order."""
    alphabet = set(alphabet)
    if start not in alphabet or end not in alphabet:
        raise DomainError("alphabet must contain the start and end activities")
    if orderings is None:
        orderings = ActivityOrderings.lexicographic(alphabet)
    ins = [a for a in orderings.in_order if a != end]
    outs = [a for a in orderings.out_order if a != start]
    return [CandidateNode((i,), (o,)) for i in ins for o in outs]


def children(node: CandidateNode, orderings: ActivityOrderings,
             start: str = START, end: str = END) -> list[CandidateNode]:
    """Tree children: output extensions always, input extensions only while |O| = 1."""
    in_rank = orderings.in_rank()
    out_rank = orderings.out_rank()
    result = []
    if len(node.outgoing) == 1:
        top = in_rank[node.ingoing[-1]]
        for activity in orderings.in_order[top + 1:]:
            if activity != end:
                result.append(CandidateNode(node.ingoing + (activity,), node.outgoing))
    top = out_rank[node.outgoing[-1]]
    for activity in orderings.out_order[top + 1:]:
        if activity != start:
            result.append(CandidateNode(node.ingoing, node.outgoing + (activity,)))
    return result


def _suffix_allowed(order: tuple[str, ...], banned: str) -> list[int]:
    """allowed[r] = number of activities after rank r that are not the banned one."""
    allowed = [0] * (len(order) + 1)
    for rank in range(len(order) - 1, -1, -1):
        allowed[rank] = allowed[rank + 1] + (1 if order[rank] != banned else 0)
    return allowed


def _closed_subtree_sizes(available: int, remaining_depth: int) -> list[int]:
    """Nodes per extra level in a pure output-extension subtree with the given headroom."""
    depth = min(available, remaining_depth)
    return [comb(available, j) for j in range(1, depth + 1)]


def bfs_traverse(
    alphabet: Iterable[str],
    orderings: ActivityOrderings,
    d_cut: int,
    evaluate: Callable[[Place, int], PlaceVerdict],
    on_fitting: Callable[[Place, PlaceVerdict, int], None] | None = None,
    on_level_change: Callable[[int], None] | None = None,
    start: str = START,
    end: str = END,
) -> TraversalStats:
    """Breadth-first traversal with monotonicity pruning.

    ``evaluate`` is called once per non-skipped candidate and must return its
    log-level verdict; ``on_fitting`` fires for fitting candidates in
    deterministic BFS order; ``on_level_change`` fires before the first node
    of each new depth. Statistics count skipped subtrees by closed form.
    """
    if d_cut < 2:
        raise DomainError("traversal depth must be at least 2")
    in_rank = orderings.in_rank()
    out_rank = orderings.out_rank()
    in_allowed = _suffix_allowed(orderings.in_order, end)
    out_allowed = _suffix_allowed(orderings.out_order, start)
    stats = TraversalStats()

    t0 = time.perf_counter()
    # queue entries: (ingoing, outgoing, inherited_overfed)
    level = [(node.ingoing, node.outgoing, False)
             for node in roots(alphabet, orderings, start, end)]
    stats.generation_seconds += time.perf_counter() - t0

    depth = 2
    while level and depth <= d_cut:
        if depth > 2 and on_level_change is not None:
            on_level_change(depth)
        next_level = []
        level_stats = stats.level(depth)
        for ingoing, outgoing, inherited_overfed in level:
            if inherited_overfed:
                # Pure input-extension descendant of an overfed place: known
                # overfed, not worth replaying, but its output extensions are
                # not covered by the monotonicity result and must be explored.
                stats.skipped_overfed += 1
                level_stats.skipped_overfed += 1
                underfed, overfed = False, True
            else:
                place = Place(ingoing, outgoing)
                t0 = time.perf_counter()
                verdict = evaluate(place, depth)
                stats.evaluation_seconds += time.perf_counter() - t0
                stats.visited += 1
                level_stats.visited += 1
                if verdict.fitting and on_fitting is not None:
                    on_fitting(place, verdict, depth)
                underfed, overfed = verdict.underfed, verdict.overfed

            t0 = time.perf_counter()
            if depth < d_cut:
                if len(outgoing) == 1:
                    top = in_rank[ingoing[-1]]
                    for activity in orderings.in_order[top + 1:]:
                        if activity != end:
                            next_level.append(
                                (ingoing + (activity,), outgoing, inherited_overfed or overfed))
                if not underfed:
                    top = out_rank[outgoing[-1]]
                    for activity in orderings.out_order[top + 1:]:
                        if activity != start:
                            next_level.append((ingoing, outgoing + (activity,), False))
            if underfed:
                # The whole output-extension subtree is underfed; count it by
                # closed form without generating it.
                available = out_allowed[out_rank[outgoing[-1]] + 1]
                for offset, size in enumerate(
                        _closed_subtree_sizes(available, d_cut - depth), start=1):
                    stats.skipped_underfed += size
                    stats.level(depth + offset).skipped_underfed += size
            stats.generation_seconds += time.perf_counter() - t0
        level = next_level
        depth += 1
    return stats


def collect_fitting(
    evaluator: Evaluator,
    orderings: ActivityOrderings,
    tau,
    metric: str,
    d_cut: int,
) -> tuple[dict[Place, PlaceVerdict], TraversalStats]:
    """Run the pruned traversal and gather every fitting place with its verdict."""
    accepted: dict[Place, PlaceVerdict] = {}

    def evaluate(place: Place, _depth: int) -> PlaceVerdict:
        return evaluator.classify(place, tau, metric)

    def on_fitting(place: Place, verdict: PlaceVerdict, _depth: int):
        accepted[place] = verdict

    stats = bfs_traverse(evaluator.log.alphabet, orderings, d_cut, evaluate, on_fitting)
    return accepted, stats


def enumerate_candidates(alphabet: Iterable[str], d_cut: int,
                         start: str = START, end: str = END):
    """Every candidate of depth <= d_cut, by unordered set enumeration (oracle path)."""
    from itertools import combinations

    ins = sorted(a for a in alphabet if a != end)
    outs = sorted(a for a in alphabet if a != start)
    for i_size in range(1, min(len(ins), d_cut - 1) + 1):
        for o_size in range(1, min(len(outs), d_cut - i_size) + 1):
            for ingoing in combinations(ins, i_size):
                for outgoing in combinations(outs, o_size):
                    yield Place(ingoing, outgoing)


def brute_force_fitting(
    log_or_evaluator,
    tau,
    metric: str,
    d_cut: int,
    allow_large: bool = False,
) -> dict[Place, PlaceVerdict]:
    """Evaluate every candidate with no pruning; the oracle for pruning soundness.

    Guarded against alphabets above 12 activities unless explicitly overridden.
    """
    evaluator = (log_or_evaluator if isinstance(log_or_evaluator, Evaluator)
                 else Evaluator(log_or_evaluator))
    alphabet = evaluator.log.alphabet
    if len(alphabet) > 12 and not allow_large:
        raise BudgetError(
            f"brute force over {len(alphabet)} activities "
            f"({total_candidates(len(alphabet))} candidates) needs allow_large=True")
    fitting: dict[Place, PlaceVerdict] = {}
    for place in enumerate_candidates(alphabet, d_cut):
        verdict = evaluator.classify(place, tau, metric)
        if verdict.fitting:
            fitting[place] = verdict
    return fitting
