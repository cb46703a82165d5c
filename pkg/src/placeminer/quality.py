"""Model quality metrics: alignment fitness, escaping-edges precision,
activity coverage, simplicity, and their harmonic-mean summaries.

Alignment cost is the minimal number of trace insertions/deletions needed to
reach a trace the net can replay, found by shortest-path search over the
synchronous product of trace and net (log-only and model-only moves cost 1,
synchronous moves 0). Precision replays the log's prefix tree and compares
enabled transitions against distinct observed followers per prefix.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import BoundedSearchError, DomainError
from .eventlog import EventLog, Trace
from .fitness import Evaluator
from .petri import Marking, PetriNet, enabled_transitions, fire

TOKEN_CAP = 8
MARKING_CAP = 1_000_000


@dataclass(frozen=True)
class QualityReport:
    fitness: Fraction
    precision: Fraction
    activity_coverage: Fraction
    simplicity: Fraction
    f1: Fraction
    hm: Fraction
    replayable_fraction: Fraction

    def as_dict(self) -> dict:
        return {
            "fitness": float(self.fitness),
            "precision": float(self.precision),
            "activity_coverage": float(self.activity_coverage),
            "simplicity": float(self.simplicity),
            "f1": float(self.f1),
            "hm": float(self.hm),
            "replayable_fraction": float(self.replayable_fraction),
        }


def _marking_tuple(marking: Marking, order) -> tuple[int, ...]:
    return (marking.source, marking.sink) + tuple(marking.tokens[p] for p in order)


def _final_tuple(order) -> tuple[int, ...]:
    return (0, 1) + (0,) * len(order)


def shortest_model_path(net: PetriNet, token_cap: int = TOKEN_CAP,
                        marking_cap: int = MARKING_CAP) -> int:
    """Minimal number of firings from the initial to the final marking."""
    order = net.sorted_places()
    start = _marking_tuple(Marking.initial(net), order)
    goal = _final_tuple(order)
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        state, distance = frontier.popleft()
        if state == goal:
            if distance == 0:
                raise DomainError("the net's initial marking is already final")
            return distance
        marking = _unpack(state, order)
        for activity in sorted(enabled_transitions(net, marking)):
            nxt = _marking_tuple(fire(net, marking, activity), order)
            if any(count > token_cap for count in nxt):
                continue
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > marking_cap:
                    raise BoundedSearchError(
                        f"model path search exceeded {marking_cap} markings on net "
                        f"with {len(net.places)} places")
                frontier.append((nxt, distance + 1))
    raise BoundedSearchError(
        f"no firing path from initial to final marking within token cap {token_cap} "
        f"on net with {len(net.places)} places")


def _unpack(state: tuple[int, ...], order) -> Marking:
    return Marking(tokens=dict(zip(order, state[2:])), source=state[0], sink=state[1])


def alignment_cost(net: PetriNet, trace: Trace, token_cap: int = TOKEN_CAP,
                   marking_cap: int = MARKING_CAP) -> int:
    """Minimal insert+delete edit cost between the trace and the net's behavior.

    0-1 shortest path over (position, marking): synchronous moves are free,
    log-only and model-only moves cost one edit each.
    """
    order = net.sorted_places()
    initial = _marking_tuple(Marking.initial(net), order)
    final = _final_tuple(order)
    target = len(trace)
    start = (0, initial)
    best = {start: 0}
    frontier = deque([start])
    while frontier:
        state = frontier.popleft()
        position, marking_state = state
        cost = best[state]
        if position == target and marking_state == final:
            return cost
        marking = _unpack(marking_state, order)
        enabled = enabled_transitions(net, marking)
        moves = []
        if position < target and trace[position] in enabled:
            nxt = _marking_tuple(fire(net, marking, trace[position]), order)
            moves.append(((position + 1, nxt), 0))
        if position < target:
            moves.append(((position + 1, marking_state), 1))
        for activity in sorted(enabled):
            nxt = _marking_tuple(fire(net, marking, activity), order)
            moves.append(((position, nxt), 1))
        for nxt_state, step in moves:
            if any(count > token_cap for count in nxt_state[1]):
                continue
            new_cost = cost + step
            if nxt_state not in best or new_cost < best[nxt_state]:
                best[nxt_state] = new_cost
                if len(best) > marking_cap:
                    raise BoundedSearchError(
                        f"alignment search exceeded {marking_cap} states")
                if step == 0:
                    frontier.appendleft(nxt_state)
                else:
                    frontier.append(nxt_state)
    raise BoundedSearchError(
        f"alignment search exhausted without reaching the final marking "
        f"(token cap {token_cap})")


def alignment_fitness(net: PetriNet, log: EventLog, token_cap: int = TOKEN_CAP,
                      marking_cap: int = MARKING_CAP) -> Fraction:
    """Variant-count-weighted mean of per-trace normalized alignment scores."""
    shortest = shortest_model_path(net, token_cap, marking_cap)
    total = Fraction(0)
    for trace, count in log.variants:
        cost = alignment_cost(net, trace, token_cap, marking_cap)
        score = 1 - Fraction(cost, len(trace) + shortest)
        total += count * score
    return total / log.total


def escaping_edges_precision(net: PetriNet, log: EventLog,
                             blocked_log: list | None = None) -> Fraction:
    """Fired-vs-enabled ratio over the log's unique replayable prefixes.

    Each prefix state contributes its weight times the number of enabled
    transitions and its weight times the number of distinct enabled follower
    activities. A follower that is not enabled stops that branch (logged),
    so the state still witnesses the model's permissiveness but nothing
    below the blocked event is counted.
    """
    root_weight = log.total
    # prefix tree: node -> (weight, ordered distinct followers)
    children: dict[Trace, dict[str, int]] = {(): {}}
    weights: dict[Trace, int] = {(): root_weight}
    for trace, count in log.variants:
        prefix: Trace = ()
        for activity in trace:
            children[prefix][activity] = children[prefix].get(activity, 0) + count
            prefix = prefix + (activity,)
            weights[prefix] = weights.get(prefix, 0) + count
            children.setdefault(prefix, {})
    enabled_total = 0
    fired_total = 0
    stack = [((), Marking.initial(net))]
    while stack:
        prefix, marking = stack.pop()
        followers = children[prefix]
        if not followers:
            continue
        weight = weights[prefix]
        enabled = enabled_transitions(net, marking)
        fired = [a for a in sorted(followers) if a in enabled]
        enabled_total += weight * len(enabled)
        fired_total += weight * len(fired)
        for activity in sorted(followers):
            if activity in enabled:
                stack.append((prefix + (activity,), fire(net, marking, activity)))
            elif blocked_log is not None:
                blocked_log.append({"prefix": list(prefix), "blocked": activity})
    if enabled_total == 0:
        return Fraction(0)
    return Fraction(fired_total, enabled_total)


def activity_coverage(net: PetriNet, log: EventLog) -> Fraction:
    """Fraction of the log's user activities kept as transitions (start/end excluded)."""
    log_user = log.alphabet - {net.start, net.end}
    net_user = net.activities - {net.start, net.end}
    if not net_user <= log_user:
        raise DomainError("net activities must be a subset of the log alphabet")
    if not log_user:
        return Fraction(1)
    return Fraction(len(net_user), len(log_user))


def simplicity(net: PetriNet) -> Fraction:
    """Fraction of net nodes that are transitions; source and sink count as places."""
    place_count = len(net.places) + 2
    return 1 - Fraction(place_count, place_count + len(net.activities))


def _harmonic(values: list[Fraction]) -> Fraction:
    if any(value == 0 for value in values):
        return Fraction(0)
    return Fraction(len(values)) / sum(1 / value for value in values)


def replayable_fraction(net: PetriNet, log: EventLog,
                        evaluator: Evaluator | None = None) -> Fraction:
    """Share of traces the net can actually replay: activities all present and
    every place fitting."""
    if evaluator is None:
        evaluator = Evaluator(log)
    mask = evaluator.full_mask
    for place in net.places:
        mask &= evaluator.fitting_mask(place)
    covered = 0
    for index, trace in enumerate(evaluator.variants):
        if mask >> index & 1 and set(trace) <= net.activities:
            covered += evaluator.counts[index]
    return Fraction(covered, log.total)


def summarize(net: PetriNet, log: EventLog, evaluator: Evaluator | None = None,
              blocked_log: list | None = None) -> QualityReport:
    """Assemble the full quality report for a net against a normalized log."""
    fitness = alignment_fitness(net, log)
    precision = escaping_edges_precision(net, log, blocked_log)
    coverage = activity_coverage(net, log)
    simple = simplicity(net)
    return QualityReport(
        fitness=fitness,
        precision=precision,
        activity_coverage=coverage,
        simplicity=simple,
        f1=_harmonic([fitness, precision]),
        hm=_harmonic([fitness, precision, coverage]),
        replayable_fraction=replayable_fraction(net, log, evaluator),
    )
