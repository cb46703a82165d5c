"""Petri-net place discovery from event logs with replay guarantees."""

from .eventlog import END, START, EventLog, activated, augment_endpoints, parse_csv, parse_xes
from .fitness import (Evaluator, PlaceVerdict, Status, classify, fitness_absolute,
                      fitness_aggregated, fitness_combined, fitness_relative)
from .petri import (Marking, PetriNet, Place, TraceVerdict, classify_log,
                    enabled_transitions, net_fitting, replay_trace)
from .selection import DiscoveryConfig, adapt_delta, run_selection
from .discovery import RunResult, run_discovery

__all__ = [
    "END", "START", "EventLog", "activated", "augment_endpoints", "parse_csv", "parse_xes",
    "Evaluator", "PlaceVerdict", "Status", "classify", "fitness_absolute",
    "fitness_aggregated", "fitness_combined", "fitness_relative",
    "Marking", "PetriNet", "Place", "TraceVerdict", "classify_log",
    "enabled_transitions", "net_fitting", "replay_trace",
    "DiscoveryConfig", "adapt_delta", "run_selection",
    "RunResult", "run_discovery",
]
