"""Scripted snapshot-isolation check.

Take a snapshot, hammer one of the two handles with mutations, and keep
draining the other. Every drain must return the same multiset.
"""
from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field

from ..concurrent_heap import CHeap


@dataclass(frozen=True)
class IsolationPlan:
    base_size: int = 1000
    mutations: int = 10_000
    drain_every: int = 500
    mutate: str = "origin"  # or "snapshot"
    concurrent: bool = False
    seed: int = 0


@dataclass
class IsolationReport:
    drains: int = 0
    mismatches: list = field(default_factory=list)  # drain indices that differed
    expected_size: int = 0

    @property
    def identical(self) -> bool:
        return not self.mismatches

    def __bool__(self):
        return self.identical


def _mutate(heap: CHeap, rng: random.Random, hi: int):
    r = rng.random()
    if r < 0.5:
        heap.insert(rng.randrange(hi))
    elif r < 0.95:
        heap.remove_min()
    else:
        # nested snapshots of the mutated side must not leak either
        heap.snapshot().release()


def check_snapshot_isolation(plan: IsolationPlan) -> IsolationReport:
    if plan.mutate not in ("origin", "snapshot"):
        raise ValueError(f"mutate must be 'origin' or 'snapshot', not {plan.mutate!r}")
    rng = random.Random(plan.seed)
    hi = 4 * max(plan.base_size, 1)
    origin = CHeap(rng.randrange(hi) for _ in range(plan.base_size))
    snap = origin.snapshot()
    target, frozen = (origin, snap) if plan.mutate == "origin" else (snap, origin)
    expected = frozen.to_sorted_list()
    report = IsolationReport(expected_size=len(expected))

    def observe():
        if frozen.to_sorted_list() != expected:
            report.mismatches.append(report.drains)
        report.drains += 1

    if plan.concurrent:
        done = threading.Event()

        def mutator():
            try:
                for _ in range(plan.mutations):
                    _mutate(target, rng, hi)
            finally:
                done.set()

        t = threading.Thread(target=mutator, name="isolation-mutator")
        t.start()
        while not done.is_set():
            observe()
        t.join()
        observe()
    else:
        observe()
        for i in range(1, plan.mutations + 1):
            _mutate(target, rng, hi)
            if plan.drain_every and i % plan.drain_every == 0:
                observe()
        observe()
    snap.release()
    return report
