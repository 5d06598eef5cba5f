"""Enumerate every history a tiny workload can produce.

Used to cross-check the linearizability checker: for each real-time
arrangement of invoke/respond events, and each response vector some
sequential execution could produce, the checker's verdict has to agree with
:func:`check_by_permutation`.
"""
from __future__ import annotations

import bisect
import itertools
from typing import Any, Iterator, Sequence

from .checker import check_by_permutation, check_linearizable
from .history import Event, History

Program = Sequence[tuple[str, Any]]


def _interleavings(lengths: Sequence[int]) -> Iterator[list[int]]:
    """All merges of per-thread sequences, as lists of thread ids."""
    remaining = list(lengths)
    total = sum(lengths)
    out: list[int] = []

    def rec():
        if len(out) == total:
            yield list(out)
            return
        for t, left in enumerate(remaining):
            if left:
                remaining[t] -= 1
                out.append(t)
                yield from rec()
                out.pop()
                remaining[t] += 1

    yield from rec()


def _simulate(initial, programs: Sequence[Program], schedule: Sequence[int]) -> dict:
    items = sorted(initial)
    cursor = [0] * len(programs)
    resp = {}
    for t in schedule:
        i = cursor[t]
        cursor[t] += 1
        op, arg = programs[t][i]
        if op == "insert":
            bisect.insort(items, arg)
            got = None
        elif op == "remove_min":
            got = items.pop(0) if items else None
        elif op == "get_min":
            got = items[0] if items else None
        elif op == "sum":
            got = sum(items)
        elif op == "snapshot":
            got = tuple(items)
        else:
            raise ValueError(op)
        resp[(t, i)] = got
    return resp


def sequential_outcomes(programs: Sequence[Program], initial=()) -> list[dict]:
    """Distinct response maps over every program-order-respecting schedule."""
    seen = {}
    for schedule in _interleavings([len(p) for p in programs]):
        r = _simulate(initial, programs, schedule)
        seen.setdefault(tuple(sorted(r.items(), key=lambda kv: kv[0])), r)
    return list(seen.values())


def event_orders(programs: Sequence[Program]) -> Iterator[list[tuple[int, int, str]]]:
    """Every real-time arrangement as ``(thread, op_index, phase)`` triples."""
    for merge in _interleavings([2 * len(p) for p in programs]):
        cursor = [0] * len(programs)
        events = []
        for t in merge:
            k = cursor[t]
            cursor[t] += 1
            events.append((t, k // 2, "invoke" if k % 2 == 0 else "respond"))
        yield events


def build_history(order, programs: Sequence[Program], responses: dict, initial=()) -> History:
    events = []
    for seq, (t, i, phase) in enumerate(order, start=1):
        op, arg = programs[t][i]
        if phase == "invoke":
            events.append(Event(seq, t, phase, op, arg, None))
        else:
            events.append(Event(seq, t, phase, op, None, responses[(t, i)]))
    return History(events, tuple(initial))


def mixed_outcomes(programs: Sequence[Program], initial=()) -> list[dict]:
    """Every combination of per-op responses seen in *some* sequential run.

    Most of these are not linearizable under any order, which is the point:
    they exercise the rejecting side of the checkers.
    """
    per_op: dict = {}
    for r in sequential_outcomes(programs, initial):
        for k, v in r.items():
            per_op.setdefault(k, {})[repr(v)] = v
    keys = sorted(per_op)
    return [dict(zip(keys, combo))
            for combo in itertools.product(*(list(per_op[k].values()) for k in keys))]


def checker_agreement(programs: Sequence[Program], initial=(),
                      mix: bool = False) -> tuple[int, list[History]]:
    """Return (histories checked, histories where the two checkers disagree)."""
    outcomes = (mixed_outcomes if mix else sequential_outcomes)(programs, initial)
    checked = 0
    disagreements = []
    for order in event_orders(programs):
        for resp in outcomes:
            h = build_history(order, programs, resp, initial)
            checked += 1
            if bool(check_linearizable(h)) != check_by_permutation(h):
                disagreements.append(h)
    return checked, disagreements
