"""Synchronisation helpers for the concurrent heap."""
from __future__ import annotations

import threading


class RWLock:
    """Writer-preferring reader/writer lock.

    Not reentrant. Writers queue ahead of newly arriving readers so a stream
    of ``get_min`` calls cannot starve mutators.
    """

    __slots__ = ("_cond", "_readers", "_writer", "_waiting_writers")

    def __init__(self):
        self._cond = threading.Condition(threading.Lock())
        self._readers = 0
        self._writer = False
        self._waiting_writers = 0

    def acquire_read(self):
        with self._cond:
            while self._writer or self._waiting_writers:
                self._cond.wait()
            self._readers += 1

    def release_read(self):
        with self._cond:
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self):
        with self._cond:
            self._waiting_writers += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._waiting_writers -= 1
            self._writer = True

    def release_write(self):
        with self._cond:
            self._writer = False
            self._cond.notify_all()


class LockOrderError(AssertionError):
    pass


class LockOrderTracker:
    """Per-thread record of held lock depths.

    The heap reports every holder-lock and node-lock acquisition with the
    node's depth (holder = -1). A new lock must be at least as deep as every
    lock already held, at most two locks (a sibling pair) may share a depth,
    and a holder lock may never be taken while a node lock is held.
    """

    def __init__(self):
        self._local = threading.local()
        self.violations: list[str] = []
        self.max_held = 0

    def _held(self) -> list:
        held = getattr(self._local, "held", None)
        if held is None:
            held = self._local.held = []
        return held

    def acquired(self, depth: int):
        held = self._held()
        if held:
            deepest = max(held)
            if depth < deepest:
                self._fail(f"acquired depth {depth} while holding {sorted(held)}")
            elif depth == deepest and (depth < 0 or held.count(depth) >= 2):
                self._fail(f"third lock at depth {depth} (holding {sorted(held)})")
        held.append(depth)
        if len(held) > self.max_held:
            self.max_held = len(held)

    def released(self, depth: int):
        held = self._held()
        try:
            held.remove(depth)
        except ValueError:
            self._fail(f"released depth {depth} which was not held")

    def _fail(self, msg: str):
        self.violations.append(f"{threading.current_thread().name}: {msg}")
        raise LockOrderError(msg)

