"""Brute-force linearizability checking for small priority-queue histories.

``check_linearizable`` searches for a witness order in the style of Wing and
Gong: repeatedly pick an operation that no remaining operation must precede
in real time, replay it on the persistent heap, and backtrack on a mismatch.
``check_by_permutation`` is a deliberately naive second opinion that tries
every permutation against a sorted-list model; tests use it to validate the
first.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from ..persistent import PHeap
from .history import History, Operation

MAX_OPS = 8
MAX_THREADS = 4


class HistoryTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    linearizable: bool
    witness: Optional[tuple[int, ...]] = None  # indices into operations()

    def __bool__(self):
        return self.linearizable


def _apply(heap: PHeap, op: Operation):
    kind = op.op
    if kind == "insert":
        return heap.insert(op.arg), None
    if kind == "remove_min":
        return heap.remove_min()
    if kind == "get_min":
        return heap, heap.get_min()
    if kind == "sum":
        return heap, sum(heap)
    if kind == "snapshot":
        return heap, tuple(heap.to_sorted_list())
    raise ValueError(f"unknown operation {kind!r}")


def _check_size(ops: Sequence[Operation], history: History, max_ops: int, max_threads: int):
    if len(ops) > max_ops or len(history.threads) > max_threads:
        raise HistoryTooLarge(
            f"{len(ops)} operations on {len(history.threads)} threads "
            f"exceeds the {max_ops}/{max_threads} bound")


def check_linearizable(history: History, max_ops: int = MAX_OPS,
                       max_threads: int = MAX_THREADS) -> Verdict:
    ops = history.operations()
    _check_size(ops, history, max_ops, max_threads)
    n = len(ops)
    full = (1 << n) - 1
    dead: set = set()
    order: list[int] = []

    def search(mask: int, heap: PHeap) -> bool:
        if mask == full:
            return True
        key = (mask, tuple(heap.to_sorted_list()))
        if key in dead:
            return False
        horizon = min(ops[j].responded for j in range(n) if not mask >> j & 1)
        for i in range(n):
            if mask >> i & 1 or ops[i].invoked > horizon:
                continue
            nxt, resp = _apply(heap, ops[i])
            if resp != ops[i].resp:
                continue
            order.append(i)
            if search(mask | 1 << i, nxt):
                return True
            order.pop()
        dead.add(key)
        return False

    if search(0, PHeap.from_iterable(history.initial)):
        return Verdict(True, tuple(order))
    return Verdict(False)


def _replay_list(initial, ops: Sequence[Operation]) -> bool:
    items = sorted(initial)
    for op in ops:
        if op.op == "insert":
            bisect.insort(items, op.arg)
            got = None
        elif op.op == "remove_min":
            got = items.pop(0) if items else None
        elif op.op == "get_min":
            got = items[0] if items else None
        elif op.op == "sum":
            got = sum(items)
        elif op.op == "snapshot":
            got = tuple(items)
        else:
            raise ValueError(op.op)
        if got != op.resp:
            return False
    return True


def check_by_permutation(history: History) -> bool:
    """Exhaustive reference check; factorial in the number of operations."""
    ops = history.operations()
    for perm in itertools.permutations(ops):
        if any(perm[b].responded < perm[a].invoked
               for a in range(len(perm)) for b in range(a + 1, len(perm))):
            continue
        if _replay_list(history.initial, perm):
            return True
    return False
