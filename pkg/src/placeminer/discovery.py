"""End-to-end discovery pipeline: normalize, mine, post-process, score.

The pipeline is deterministic for a given (log, config); wall-clock numbers
are collected per phase so run reports can show where time went, with the
mining phase further split into candidate generation, evaluation and
selection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .eventlog import EventLog, augment_endpoints
from .fitness import Evaluator
from .petri import PetriNet
from .postprocess import PostprocessReport, postprocess
from .quality import QualityReport, summarize
from .selection import DiscoveryConfig, SelectionResult, run_selection

SCHEMA_VERSION = 1


@dataclass
class RunResult:
    config: DiscoveryConfig
    raw_digest: str
    log: EventLog
    selection: SelectionResult
    selected_net: PetriNet
    net: PetriNet
    post_report: PostprocessReport
    quality: QualityReport
    blocked_prefixes: list = field(default_factory=list)
    phase_seconds: dict = field(default_factory=dict)

    @property
    def dead_transition_count(self) -> int:
        return len(self.post_report.removed_activities)


def run_discovery(raw_log: EventLog, config: DiscoveryConfig,
                  prepared: tuple[EventLog, Evaluator] | None = None) -> RunResult:
    """Mine a net from a raw log; `prepared` shares a normalized log and its
    replay cache across runs on the same input."""
    config.validate()
    raw_digest = raw_log.digest()
    phases: dict[str, float] = {}

    t0 = time.perf_counter()
    if prepared is None:
        log = augment_endpoints(raw_log)
        evaluator = Evaluator(log)
    else:
        log, evaluator = prepared
    selection = run_selection(log, config, evaluator)
    selected_net = PetriNet(frozenset(log.alphabet), frozenset(selection.accepted))
    phases["mine"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    net, post_report = postprocess(selected_net, log, evaluator)
    phases["postprocess"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    blocked: list = []
    quality = summarize(net, log, evaluator, blocked)
    phases["quality"] = time.perf_counter() - t0

    return RunResult(
        config=config,
        raw_digest=raw_digest,
        log=log,
        selection=selection,
        selected_net=selected_net,
        net=net,
        post_report=post_report,
        quality=quality,
        blocked_prefixes=blocked,
        phase_seconds=phases,
    )


def build_manifest(result: RunResult, extra_phases: dict | None = None,
                   selection_trace_name: str = "selection.jsonl") -> dict:
    """The run report: config echo, digests, statistics, reports, timings."""
    phases = dict(result.phase_seconds)
    if extra_phases:
        phases.update(extra_phases)
    stats = result.selection.stats
    return {
        "schema_version": SCHEMA_VERSION,
        "config": result.config.as_dict(),
        "log": {
            "digest": result.raw_digest,
            "traces": result.log.total,
            "variants": len(result.log.variants),
            "activities": sorted(result.log.alphabet),
        },
        "traversal": stats.as_dict(),
        "selection": {
            "accepted_places": len(result.selection.accepted),
            "decisions": len(result.selection.trace),
            "replayable_traces": result.selection.replayable,
            "trace_file": selection_trace_name,
        },
        "postprocess": result.post_report.as_dict(),
        "net": {
            "activities": sorted(result.net.activities),
            "places": [str(place) for place in result.net.sorted_places()],
        },
        "quality": result.quality.as_dict(),
        "blocked_prefixes": result.blocked_prefixes,
        "timing": {
            "phases": phases,
            "total": sum(phases.values()),
            "mine_breakdown": {
                "generation": stats.generation_seconds,
                "evaluation": stats.evaluation_seconds,
                "selection": result.selection.selection_seconds,
            },
        },
    }


def manifest_without_timing(manifest: dict) -> dict:
    """Determinism-comparable view of a manifest."""
    return {key: value for key, value in manifest.items() if key != "timing"}
