"""Randomised multi-threaded workout over a family of related handles."""
from __future__ import annotations

import random
import sys
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from ..concurrent_heap import CHeap, ReleasedHandleError

MAX_LIVE_SNAPSHOTS = 24


@dataclass
class StressOutcome:
    handles: list[CHeap]
    op_counts: Counter = field(default_factory=Counter)
    misuse: int = 0  # ops that raced with a release and were refused

    @property
    def live(self) -> list[CHeap]:
        return [h for h in self.handles if not h.released]


def run_stress(threads: int = 8, total_ops: int = 10_000, seed: int = 0,
               initial_size: int = 256, switch_interval: Optional[float] = 1e-5) -> StressOutcome:
    """Hammer an origin heap and its snapshots from ``threads`` workers.

    Every worker mixes inserts, removals, peeks, snapshots of random live
    handles, releases and short prefix sums. Returns all handles so the
    caller can sweep them once the run is quiescent.
    """
    rng = random.Random(seed)
    origin = CHeap(rng.randrange(1 << 16) for _ in range(initial_size))
    handles = [origin]
    live = [origin]
    lock = threading.Lock()
    counts = [Counter() for _ in range(threads)]
    misuse = [0] * threads
    errors: list[BaseException] = []
    barrier = threading.Barrier(threads)
    per_thread = [total_ops // threads + (i < total_ops % threads) for i in range(threads)]

    def worker(t: int):
        r = random.Random(seed * 1000 + t)
        c = counts[t]
        try:
            barrier.wait()
            for _ in range(per_thread[t]):
                with lock:
                    h = r.choice(live)
                p = r.random()
                try:
                    if p < 0.38:
                        h.insert(r.randrange(1 << 16))
                        c["insert"] += 1
                    elif p < 0.70:
                        h.remove_min()
                        c["remove_min"] += 1
                    elif p < 0.80:
                        h.get_min()
                        c["get_min"] += 1
                    elif p < 0.88:
                        with lock:
                            room = len(live) < MAX_LIVE_SNAPSHOTS
                        if room:
                            s = h.snapshot()
                            with lock:
                                handles.append(s)
                                live.append(s)
                        c["snapshot"] += 1
                    elif p < 0.93:
                        if h is not origin:
                            with lock:
                                if h in live:
                                    live.remove(h)
                            h.release()
                        c["release"] += 1
                    else:
                        h.sum_smallest(8)
                        c["sum"] += 1
                except ReleasedHandleError:
                    misuse[t] += 1
        except BaseException as e:
            errors.append(e)
            barrier.abort()

    old = sys.getswitchinterval()
    if switch_interval is not None:
        sys.setswitchinterval(switch_interval)
    try:
        ts = [threading.Thread(target=worker, args=(i,), name=f"stress-{i}") for i in range(threads)]
        for th in ts:
            th.start()
        for th in ts:
            th.join()
    finally:
        sys.setswitchinterval(old)
    if errors:
        raise errors[0]
    total = Counter()
    for c in counts:
        total.update(c)
    return StressOutcome(handles, total, sum(misuse))
