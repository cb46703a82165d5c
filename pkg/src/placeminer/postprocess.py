"""Net cleanup after selection: dead transitions, log-implicit places, self-loop merges.

Implicitness here is log-relative: a place may go (or a merge may happen)
only when the net's fitting trace multiset stays identical AND the enabled
transition set is unchanged at every replay prefix of every fitting trace.
That is strictly observable behavior, which is what the acceptance checks
measure; the run report labels removals "log-implicit" accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .eventlog import EventLog
from .fitness import Evaluator
from .petri import Place, PetriNet


@dataclass
class PostprocessReport:
    removed_activities: list[str] = field(default_factory=list)
    removed_implicit_places: list[str] = field(default_factory=list)
    merged_place_groups: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "removed_activities": self.removed_activities,
            "removed_implicit_places": self.removed_implicit_places,
            "merged_place_groups": self.merged_place_groups,
        }


def _net_fitting_mask(net: PetriNet, evaluator: Evaluator) -> int:
    mask = evaluator.full_mask
    for place in net.places:
        mask &= evaluator.fitting_mask(place)
    return mask


def _fitting_variants(net: PetriNet, evaluator: Evaluator) -> list[int]:
    mask = _net_fitting_mask(net, evaluator)
    indices = []
    index = 0
    while mask:
        if mask & 1:
            indices.append(index)
        mask >>= 1
        index += 1
    return indices


def remove_dead_transitions(net: PetriNet, log: EventLog,
                            evaluator: Evaluator | None = None
                            ) -> tuple[PetriNet, PostprocessReport]:
    """Drop activities that occur in no replayable trace, with their arcs.

    Trimming arcs can empty a place's ingoing or outgoing side; such places
    are dropped as well. Alive activities only grow when places weaken, so a
    single pass reaches the fixpoint.
    """
    if evaluator is None:
        evaluator = Evaluator(log)
    report = PostprocessReport()
    alive: set[str] = {net.start, net.end} if _net_fitting_mask(net, evaluator) else set()
    for index in _fitting_variants(net, evaluator):
        alive.update(evaluator.variants[index])
    dead = sorted(net.activities - alive)
    if not dead:
        return net, report
    report.removed_activities = dead
    new_places = set()
    for place in net.places:
        ingoing = place.ingoing & alive
        outgoing = place.outgoing & alive
        if ingoing and outgoing:
            new_places.add(Place(ingoing, outgoing))
    new_net = PetriNet(frozenset(alive) if alive else frozenset({net.start, net.end}),
                       frozenset(new_places), net.start, net.end)
    return new_net, report


def _blocked_solely_by(net: PetriNet, place: Place, tokens: dict[Place, int],
                       source: int) -> bool:
    """True if some transition is blocked only by this place at this marking."""
    for activity in place.outgoing:
        if tokens[place] >= 1:
            continue
        if activity == net.start and source < 1:
            continue
        if all(tokens[other] >= 1
               for other in net.places
               if other != place and activity in other.outgoing):
            return True
    return False


def _replay_token_course(net: PetriNet, trace) -> list[tuple[dict[Place, int], int]]:
    """(tokens, source) at every prefix of a fitting trace, cheap per-place counting."""
    tokens = {place: 0 for place in net.places}
    source = 1
    course = [(dict(tokens), source)]
    for activity in trace:
        if activity == net.start:
            source -= 1
        for place in net.places:
            if activity in place.outgoing:
                tokens[place] -= 1
            if activity in place.ingoing:
                tokens[place] += 1
        course.append((dict(tokens), source))
    return course


def is_log_implicit(net: PetriNet, place: Place, evaluator: Evaluator) -> bool:
    """Removal of the place neither grows the fitting multiset nor changes any
    enabled set along the replay of a fitting trace."""
    net_mask = _net_fitting_mask(net, evaluator)
    rest_mask = evaluator.full_mask
    for other in net.places:
        if other != place:
            rest_mask &= evaluator.fitting_mask(other)
    if rest_mask != net_mask:
        return False
    for index in _fitting_variants(net, evaluator):
        for tokens, source in _replay_token_course(net, evaluator.variants[index]):
            if _blocked_solely_by(net, place, tokens, source):
                return False
    return True


class _PrefixGateIndex:
    """Per-prefix count of empty gating places per transition, over fitting traces.

    A place solely blocks a transition t at a prefix when it is empty there
    and the empty-gate count of t is exactly one. Token courses per place
    depend only on the trace, so removals just decrement counts.
    """

    def __init__(self, places: list[Place], traces):
        self.tokens: dict[Place, list[int]] = {place: [] for place in places}
        self.blocked: list[dict[str, int]] = []
        for trace in traces:
            counts = {place: 0 for place in places}
            self._snapshot(counts)
            for activity in trace:
                for place in places:
                    if activity in place.outgoing:
                        counts[place] -= 1
                    if activity in place.ingoing:
                        counts[place] += 1
                self._snapshot(counts)

    def _snapshot(self, counts: dict[Place, int]):
        blocked: dict[str, int] = {}
        for place, tokens in counts.items():
            self.tokens[place].append(tokens)
            if tokens == 0:
                for activity in place.outgoing:
                    blocked[activity] = blocked.get(activity, 0) + 1
        self.blocked.append(blocked)

    def solely_blocks(self, place: Place) -> bool:
        course = self.tokens[place]
        for position, blocked in enumerate(self.blocked):
            if course[position] == 0:
                for activity in place.outgoing:
                    if blocked.get(activity, 0) == 1:
                        return True
        return False

    def drop(self, place: Place):
        course = self.tokens.pop(place)
        for position, blocked in enumerate(self.blocked):
            if course[position] == 0:
                for activity in place.outgoing:
                    blocked[activity] -= 1


def remove_implicit_places(net: PetriNet, log: EventLog,
                           evaluator: Evaluator | None = None
                           ) -> tuple[PetriNet, PostprocessReport]:
    """Iteratively drop places whose removal is unobservable on the log.

    Candidates are tried most-connected first (keeps simple places), with the
    place key as the deterministic tie-break, until a full pass removes
    nothing. Removals within a pass take effect immediately.
    """
    if evaluator is None:
        evaluator = Evaluator(log)
    report = PostprocessReport()
    places = set(net.places)
    net_mask = _net_fitting_mask(net, evaluator)
    # Fitting traces and per-place token courses are unaffected by removals
    # (removal preserves the fitting multiset by the rest-mask condition), so
    # the gate index is built once and updated incrementally.
    traces = [evaluator.variants[i] for i in _fitting_variants(net, evaluator)]
    index = _PrefixGateIndex(sorted(places, key=Place.key), traces)
    changed = True
    while changed:
        changed = False
        for place in sorted(places, key=lambda p: (-p.size, p.key())):
            rest_mask = evaluator.full_mask
            for other in places:
                if other != place:
                    rest_mask &= evaluator.fitting_mask(other)
            if rest_mask != net_mask:
                continue
            if index.solely_blocks(place):
                continue
            places.remove(place)
            index.drop(place)
            report.removed_implicit_places.append(str(place))
            changed = True
    return net.with_places(places), report


def _enabled_at(net: PetriNet, tokens: dict[Place, int], source: int) -> frozenset[str]:
    enabled = set()
    for activity in net.activities:
        if activity == net.start and source < 1:
            continue
        if all(tokens[place] >= 1 for place in net.places if activity in place.outgoing):
            enabled.add(activity)
    return frozenset(enabled)


def _same_observable_behavior(net: PetriNet, other: PetriNet, evaluator: Evaluator) -> bool:
    """Identical fitting multiset and identical enabled sets along fitting prefixes."""
    mask = _net_fitting_mask(net, evaluator)
    if _net_fitting_mask(other, evaluator) != mask:
        return False
    for index in _fitting_variants(net, evaluator):
        trace = evaluator.variants[index]
        course_a = _replay_token_course(net, trace)
        course_b = _replay_token_course(other, trace)
        for (tokens_a, source_a), (tokens_b, source_b) in zip(course_a, course_b):
            if _enabled_at(net, tokens_a, source_a) != _enabled_at(other, tokens_b, source_b):
                return False
    return True


def merge_selfloop_places(net: PetriNet, log: EventLog,
                          evaluator: Evaluator | None = None
                          ) -> tuple[PetriNet, PostprocessReport]:
    """Merge sibling places that each add one self-looping activity to a shared base.

    A group {(I+x_j | O+x_j)} collapses into (I+x_1..x_n | O+x_1..x_n) only
    when the merged net is observably equivalent on the log; otherwise the
    group stays untouched.
    """
    if evaluator is None:
        evaluator = Evaluator(log)
    report = PostprocessReport()
    current = net
    groups: dict[tuple, list[tuple[str, Place]]] = {}
    for place in net.sorted_places():
        loops = place.ingoing & place.outgoing
        if len(loops) != 1:
            continue
        loop = next(iter(loops))
        base = (tuple(sorted(place.ingoing - loops)), tuple(sorted(place.outgoing - loops)))
        groups.setdefault(base, []).append((loop, place))
    for base in sorted(groups):
        members = groups[base]
        if len(members) < 2:
            continue
        loops = {loop for loop, _ in members}
        places = [place for _, place in members]
        if not all(place in current.places for place in places):
            continue
        merged = Place(set(base[0]) | loops, set(base[1]) | loops)
        candidate = current.with_places((current.places - set(places)) | {merged})
        if _same_observable_behavior(current, candidate, evaluator):
            current = candidate
            report.merged_place_groups.append({
                "inputs": [str(place) for place in sorted(places, key=Place.key)],
                "result": str(merged),
            })
    return current, report


def postprocess(net: PetriNet, log: EventLog, evaluator: Evaluator | None = None
                ) -> tuple[PetriNet, PostprocessReport]:
    """Dead-transition removal, then implicit-place removal, then self-loop merging."""
    if evaluator is None:
        evaluator = Evaluator(log)
    report = PostprocessReport()
    net, dead_report = remove_dead_transitions(net, log, evaluator)
    net, implicit_report = remove_implicit_places(net, log, evaluator)
    net, merge_report = merge_selfloop_places(net, log, evaluator)
    report.removed_activities = dead_report.removed_activities
    report.removed_implicit_places = implicit_report.removed_implicit_places
    report.merged_place_groups = merge_report.merged_place_groups
    return net, report
