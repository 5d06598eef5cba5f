"""Histories, linearizability checking and invariant sweeps."""
from .checker import (MAX_OPS, MAX_THREADS, HistoryTooLarge, Verdict,
                      check_by_permutation, check_linearizable)
from .exhaustive import checker_agreement
from .history import Event, History, MalformedHistory, Operation, Recorder, Workload, record
from .invariants import Diagnostic, invariant_sweep
from .stress import StressOutcome, run_stress
from .isolation import IsolationPlan, IsolationReport, check_snapshot_isolation

__all__ = [
    "MAX_OPS", "MAX_THREADS", "HistoryTooLarge", "Verdict", "check_by_permutation",
    "check_linearizable", "checker_agreement", "Event", "History", "MalformedHistory",
    "Operation", "Recorder", "Workload", "record", "Diagnostic", "invariant_sweep",
    "IsolationPlan", "IsolationReport", "check_snapshot_isolation", "StressOutcome", "run_stress",
]
