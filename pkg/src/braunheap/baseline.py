"""Array binary heap behind one global mutex.

The comparison point for the Braun heap: every operation, snapshots
included, serialises on a single lock, and a snapshot copies the whole
backing array.
"""
from __future__ import annotations

import heapq
import threading


class LockedArrayHeap:
    def __init__(self, items=()):
        self._lock = threading.Lock()
        self._data = list(items)
        heapq.heapify(self._data)

    @classmethod
    def from_sorted(cls, xs) -> "LockedArrayHeap":
        h = cls()
        # a sorted list already satisfies heap order
        h._data = list(xs)
        return h

    def insert(self, x) -> None:
        with self._lock:
            heapq.heappush(self._data, x)

    def remove_min(self):
        with self._lock:
            if not self._data:
                return None
            return heapq.heappop(self._data)

    def get_min(self):
        with self._lock:
            return self._data[0] if self._data else None

    def snapshot(self) -> "LockedArrayHeap":
        with self._lock:
            data = self._data.copy()
        snap = LockedArrayHeap()
        snap._data = data
        return snap

    def release(self) -> None:
        """No-op; copies hold no shared state."""

    def sum(self, start=0):
        return sum(self.snapshot()._data, start)

    def sum_smallest(self, k: int, start=0):
        snap = self.snapshot()
        total = start
        for _ in range(k):
            x = snap.remove_min()
            if x is None:
                break
            total += x
        return total

    def size(self) -> int:
        with self._lock:
            return len(self._data)

    def to_sorted_list(self) -> list:
        return sorted(self.snapshot()._data)

    def storage(self) -> list:
        """Copy of the backing array, in heap order."""
        with self._lock:
            return self._data.copy()
