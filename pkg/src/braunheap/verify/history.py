"""Recording concurrent histories and their text format."""
from __future__ import annotations

import json
import sys
import threading
import time
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence

from ..concurrent_heap import CHeap

OPS = ("insert", "remove_min", "get_min", "snapshot", "sum")


class MalformedHistory(ValueError):
    pass


@dataclass(frozen=True)
class Event:
    seq: int
    thread: int
    phase: str  # "invoke" | "respond"
    op: str
    arg: Any = None
    resp: Any = None


@dataclass(frozen=True)
class Operation:
    """A matched invoke/respond pair."""

    thread: int
    op: str
    arg: Any
    resp: Any
    invoked: int
    responded: int


@dataclass
class History:
    events: list[Event] = field(default_factory=list)
    initial: tuple = ()

    def operations(self) -> list[Operation]:
        """Pair up events, checking well-formedness on the way."""
        pending: dict[int, Event] = {}
        ops = []
        last_seq = None
        for ev in self.events:
            if last_seq is not None and ev.seq <= last_seq:
                raise MalformedHistory(f"sequence numbers not increasing at {ev}")
            last_seq = ev.seq
            if ev.op not in OPS:
                raise MalformedHistory(f"unknown operation {ev.op!r}")
            if ev.phase == "invoke":
                if ev.thread in pending:
                    raise MalformedHistory(f"thread {ev.thread} invoked twice without a response")
                pending[ev.thread] = ev
            elif ev.phase == "respond":
                inv = pending.pop(ev.thread, None)
                if inv is None or inv.op != ev.op:
                    raise MalformedHistory(f"unmatched response {ev}")
                ops.append(Operation(ev.thread, ev.op, inv.arg, ev.resp, inv.seq, ev.seq))
            else:
                raise MalformedHistory(f"bad phase {ev.phase!r}")
        if pending:
            raise MalformedHistory(f"operations never responded: {sorted(pending)}")
        ops.sort(key=lambda o: o.invoked)
        return ops

    def is_well_formed(self) -> bool:
        try:
            self.operations()
        except MalformedHistory:
            return False
        return True

    @property
    def threads(self) -> set:
        return {ev.thread for ev in self.events}

    # text format: one event per line, tab separated ---------------------------
    def dumps(self) -> str:
        lines = ["# initial\t" + json.dumps(list(self.initial))]
        for ev in self.events:
            lines.append("\t".join([
                str(ev.seq), str(ev.thread), ev.phase, ev.op,
                json.dumps(_plain(ev.arg)), json.dumps(_plain(ev.resp)),
            ]))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "History":
        initial: tuple = ()
        events = []
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                tag, _, rest = line[1:].strip().partition("\t")
                if tag == "initial":
                    initial = tuple(json.loads(rest))
                continue
            seq, thread, phase, op, arg, resp = line.split("\t")
            events.append(Event(int(seq), int(thread), phase, op,
                                _unplain(json.loads(arg)), _unplain(json.loads(resp))))
        return cls(events, initial)


def _plain(v):
    return list(v) if isinstance(v, tuple) else v


def _unplain(v):
    return tuple(v) if isinstance(v, list) else v


class Recorder:
    """Thread-safe event log with a single logical clock."""

    def __init__(self):
        self._lock = threading.Lock()
        self._seq = 0
        self.events: list[Event] = []

    def _append(self, thread, phase, op, arg, resp) -> int:
        with self._lock:
            self._seq += 1
            self.events.append(Event(self._seq, thread, phase, op, arg, resp))
            return len(self.events) - 1

    def invoke(self, thread: int, op: str, arg=None) -> int:
        return self._append(thread, "invoke", op, arg, None)

    def respond(self, thread: int, op: str, resp=None) -> int:
        return self._append(thread, "respond", op, None, resp)

    def set_response(self, index: int, resp):
        with self._lock:
            self.events[index] = replace(self.events[index], resp=resp)


@dataclass(frozen=True)
class Workload:
    """Per-thread scripts of ``(op, arg)`` pairs run against one heap."""

    threads: tuple[tuple[tuple[str, Any], ...], ...]
    initial: tuple = ()

    @property
    def n_ops(self) -> int:
        return sum(len(t) for t in self.threads)


def _call(heap: CHeap, op: str, arg):
    if op == "insert":
        heap.insert(arg)
        return None
    if op == "remove_min":
        return heap.remove_min()
    if op == "get_min":
        return heap.get_min()
    if op == "sum":
        return heap.sum()
    raise MalformedHistory(f"unknown operation {op!r}")


def record(workload: Workload, switch_interval: Optional[float] = 1e-6,
           max_threads: int = 4, max_ops: int = 8, yield_points: bool = True) -> History:
    """Run ``workload`` concurrently on a fresh CHeap and log every call.

    A snapshot's response is filled in after all threads finish: it is the
    sorted contents of the snapshot handle, which nothing else touched.
    With ``yield_points`` each thread gives up the GIL just inside every
    call window, which makes overlapping calls far more common.
    """
    pause = (lambda: time.sleep(0)) if yield_points else (lambda: None)
    if len(workload.threads) > max_threads or workload.n_ops > max_ops:
        raise ValueError(
            f"workload too large: {len(workload.threads)} threads, {workload.n_ops} ops")
    heap = CHeap(workload.initial)
    rec = Recorder()
    barrier = threading.Barrier(len(workload.threads))
    snaps: list[tuple[int, CHeap]] = []
    errors: list[BaseException] = []

    def worker(tid: int, script: Sequence):
        try:
            barrier.wait()
            for op, arg in script:
                rec.invoke(tid, op, arg)
                pause()
                if op == "snapshot":
                    snap = heap.snapshot()
                    pause()
                    idx = rec.respond(tid, op, None)
                    snaps.append((idx, snap))
                else:
                    got = _call(heap, op, arg)
                    pause()
                    rec.respond(tid, op, got)
        except BaseException as e:  # surfaced to the caller below
            errors.append(e)
            barrier.abort()

    old = sys.getswitchinterval()
    if switch_interval is not None:
        sys.setswitchinterval(switch_interval)
    try:
        threads = [threading.Thread(target=worker, args=(i, s), name=f"rec-{i}")
                   for i, s in enumerate(workload.threads)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    finally:
        sys.setswitchinterval(old)
    if errors:
        raise MalformedHistory(f"recording aborted: {errors[0]!r}") from errors[0]
    for idx, snap in snaps:
        rec.set_response(idx, tuple(snap.to_sorted_list()))
        snap.release()
    return History(rec.events, tuple(workload.initial))
