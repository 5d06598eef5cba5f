"""Thread-safe Braun heap with O(1) snapshots.

Locking protocol
----------------
* Every handle owns a reader/writer *holder* lock guarding its root
  reference. ``get_min`` takes it in read mode, everything else in write
  mode. It is released as soon as the root node's lock is held.
* Node locks are taken hand-over-hand, strictly leafward. A sibling pair is
  always locked left first. ``remove_min`` keeps the root locked from the
  start of the pull-up phase until the push-down phase has moved below it.

Copy-on-write
-------------
Each node carries ``snap_count``: how many references to it exist beyond the
first one. A node with a non-zero count is never written; writers first
"own" it, which allocates a private copy, moves one reference from the node
to the copy, and gives each child one more reference (the copy points at
them too). The count of a node only changes while that node's lock is held.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Any, Iterable, Iterator, Optional

from .locks import LockOrderTracker, RWLock
from .persistent import BraunStructureError, Node


class ReleasedHandleError(RuntimeError):
    """Raised when a released heap handle is used again."""


class SnapNode:
    __slots__ = ("elem", "left", "right", "snap_count", "lock")

    def __init__(self, elem, left: Optional["SnapNode"] = None, right: Optional["SnapNode"] = None):
        self.elem = elem
        self.left = left
        self.right = right
        self.snap_count = 0
        self.lock = threading.Lock()

    def __repr__(self):
        return f"SnapNode({self.elem!r}, snap={self.snap_count})"


class AllocStats:
    """Counters for node allocation; pass one to ``CHeap`` to enable."""

    def __init__(self):
        self._lock = threading.Lock()
        self.nodes_allocated = 0
        self.nodes_peeled = 0

    def count(self, allocated: int = 0, peeled: int = 0):
        with self._lock:
            self.nodes_allocated += allocated
            self.nodes_peeled += peeled

    def read(self) -> tuple[int, int]:
        with self._lock:
            return self.nodes_allocated, self.nodes_peeled

    def __repr__(self):
        return f"AllocStats(allocated={self.nodes_allocated}, peeled={self.nodes_peeled})"


_tracker: Optional[LockOrderTracker] = None


@contextmanager
def lock_order_checking():
    """Record every lock acquisition and fail on out-of-order locking.

    Slows every operation down; meant for tests only.
    """
    global _tracker
    prev, _tracker = _tracker, LockOrderTracker()
    try:
        yield _tracker
    finally:
        _tracker = prev


def _lock(node: SnapNode, depth: int):
    node.lock.acquire()
    if _tracker is not None:
        try:
            _tracker.acquired(depth)
        except BaseException:
            node.lock.release()
            raise


def _unlock(node: SnapNode, depth: int):
    if _tracker is not None:
        _tracker.released(depth)
    node.lock.release()


def _new(elem, stats: Optional[AllocStats]) -> SnapNode:
    if stats is not None:
        stats.count(allocated=1)
    return SnapNode(elem)


def _own(n: SnapNode, depth: int, stats: Optional[AllocStats]) -> SnapNode:
    """Return a node that may be written in place of ``n``.

    The caller holds ``n`` and whatever references it, and must install the
    result there. The result is returned locked; if it is a fresh copy, the
    lock on ``n`` has been dropped.
    """
    if n.snap_count == 0:
        return n
    left, right = n.left, n.right
    for child in (left, right):
        if child is not None:
            _lock(child, depth + 1)
            child.snap_count += 1
            _unlock(child, depth + 1)
    n.snap_count -= 1
    fresh = SnapNode(n.elem, left, right)
    # fresh is unreachable until installed; the depth slot moves over from n
    fresh.lock.acquire()
    n.lock.release()
    if stats is not None:
        stats.count(allocated=1, peeled=1)
    return fresh


def update_node(n: SnapNode, elem, left, right, depth: int = 0,
                stats: Optional[AllocStats] = None) -> SnapNode:
    """Write ``(elem, left, right)`` into ``n``, copying it first if shared.

    Caller holds ``n``'s lock and installs the returned node (which is locked
    on return) wherever ``n`` was referenced from.
    """
    m = _own(n, depth, stats)
    assert m.snap_count == 0, "write to a shared node"
    m.elem, m.left, m.right = elem, left, right
    return m


def _build_sorted(xs, start: int, stride: int, count: int) -> Optional[SnapNode]:
    if count == 0:
        return None
    rest = count - 1
    return SnapNode(
        xs[start],
        _build_sorted(xs, start + stride, 2 * stride, rest - rest // 2),
        _build_sorted(xs, start + 2 * stride, 2 * stride, rest // 2),
    )


class CHeap:
    """Concurrent Braun min-heap.

    All methods are safe to call from any thread, on any handle, including
    handles related to each other through :meth:`snapshot`.
    """

    def __init__(self, items: Iterable = (), stats: Optional[AllocStats] = None):
        self.stats = stats
        self._holder = RWLock()
        self._root: Optional[SnapNode] = None
        self._released = False
        for x in items:
            self.insert(x)

    @classmethod
    def from_sorted(cls, xs, stats: Optional[AllocStats] = None) -> "CHeap":
        """Lay out an already sorted sequence directly as a Braun heap.

        Initialisation shortcut for large benchmark heaps; not thread-safe
        with respect to ``xs`` and not counted in ``stats``.
        """
        h = cls(stats=stats)
        h._root = _build_sorted(xs, 0, 1, len(xs))
        return h

    # holder lock ----------------------------------------------------------
    def _enter(self, write: bool = True):
        if write:
            self._holder.acquire_write()
        else:
            self._holder.acquire_read()
        if _tracker is not None:
            _tracker.acquired(-1)
        if self._released:
            self._exit(write)
            raise ReleasedHandleError("heap handle was released")

    def _exit(self, write: bool = True):
        if _tracker is not None:
            _tracker.released(-1)
        if write:
            self._holder.release_write()
        else:
            self._holder.release_read()

    def _enter_root(self) -> Optional[SnapNode]:
        """Take the holder lock, lock and own the root, drop the holder lock."""
        self._enter()
        try:
            root = self._root
            if root is None:
                return None
            _lock(root, 0)
            root = self._root = _own(root, 0, self.stats)
            return root
        finally:
            self._exit()

    # public API -----------------------------------------------------------
    def get_min(self):
        self._enter(write=False)
        try:
            root = self._root
            if root is None:
                return None
            _lock(root, 0)
            value = root.elem
            _unlock(root, 0)
            return value
        finally:
            self._exit(write=False)

    def insert(self, x) -> None:
        stats = self.stats
        self._enter()
        try:
            if self._root is None:
                self._root = _new(x, stats)
                return
            root = self._root
            _lock(root, 0)
            n = self._root = _own(root, 0, stats)
        finally:
            self._exit()
        depth = 0
        try:
            while True:
                if x < n.elem:
                    smaller, larger = x, n.elem
                else:
                    smaller, larger = n.elem, x
                old_left, old_right = n.left, n.right
                assert n.snap_count == 0, "write to a shared node"
                if old_right is None:
                    n.elem, n.left, n.right = smaller, _new(larger, stats), old_left
                    break
                _lock(old_right, depth + 1)
                child = _own(old_right, depth + 1, stats)
                # swap, and continue into the new left
                n.elem, n.left, n.right = smaller, child, old_left
                _unlock(n, depth)
                n, x, depth = child, larger, depth + 1
        finally:
            _unlock(n, depth)

    def remove_min(self):
        stats = self.stats
        self._enter()
        try:
            root = self._root
            if root is None:
                return None
            _lock(root, 0)
            result = root.elem
            if root.left is None:
                # lone root: drop this handle's reference to it
                if root.snap_count > 0:
                    root.snap_count -= 1
                _unlock(root, 0)
                self._root = None
                return result
            root = self._root = _own(root, 0, stats)
        finally:
            self._exit()

        # phase 1: detach the leftmost leaf, swapping children on the way
        n, depth = root, 0
        while True:
            child = n.left
            _lock(child, depth + 1)
            assert n.snap_count == 0, "write to a shared node"
            if child.left is None:
                pulled = child.elem
                if child.snap_count > 0:
                    child.snap_count -= 1
                _unlock(child, depth + 1)
                n.left, n.right = n.right, None
                if n is not root:
                    _unlock(n, depth)
                break
            child = _own(child, depth + 1, stats)
            n.left, n.right = n.right, child
            if n is not root:
                _unlock(n, depth)
            n, depth = child, depth + 1

        # phase 2: the root is still locked; sift the pulled value down
        root.elem = pulled
        self._push_down(root)
        return result

    def _push_down(self, n: SnapNode):
        stats = self.stats
        depth = 0
        while True:
            left, right = n.left, n.right
            if left is None:
                _unlock(n, depth)
                if right is not None:
                    raise BraunStructureError("This tree is not Braun")
                return
            _lock(left, depth + 1)
            if right is None:
                if left.elem < n.elem:
                    left = n.left = _own(left, depth + 1, stats)
                    assert n.snap_count == 0 and left.snap_count == 0
                    n.elem, left.elem = left.elem, n.elem
                _unlock(left, depth + 1)
                _unlock(n, depth)
                return
            _lock(right, depth + 1)
            e = n.elem
            if e <= left.elem and e <= right.elem:
                _unlock(right, depth + 1)
                _unlock(left, depth + 1)
                _unlock(n, depth)
                return
            if left.elem <= right.elem:
                _unlock(right, depth + 1)
                child = n.left = _own(left, depth + 1, stats)
            else:
                _unlock(left, depth + 1)
                child = n.right = _own(right, depth + 1, stats)
            assert n.snap_count == 0 and child.snap_count == 0, "write to a shared node"
            n.elem, child.elem = child.elem, e
            _unlock(n, depth)
            n, depth = child, depth + 1

    def snapshot(self) -> "CHeap":
        """O(1): share the root with a new handle and bump its count."""
        self._enter()
        try:
            root = self._root
            if root is not None:
                _lock(root, 0)
                root.snap_count += 1
                _unlock(root, 0)
            snap = CHeap(stats=self.stats)
            snap._root = root
            return snap
        finally:
            self._exit()

    def release(self) -> None:
        """Give up this handle.

        Only the root's count is decremented; counts further down stay
        conservatively high, which can cost extra copies later but never
        correctness. Using the handle afterwards raises ReleasedHandleError.
        """
        self._enter()
        try:
            root = self._root
            if root is not None:
                _lock(root, 0)
                if root.snap_count > 0:
                    root.snap_count -= 1
                _unlock(root, 0)
            self._root = None
            self._released = True
        finally:
            self._exit()

    @property
    def released(self) -> bool:
        return self._released

    # bulk reads over a private snapshot -------------------------------------
    def iterate(self) -> Iterator:
        """Yield every element of a point-in-time copy, in tree order."""
        snap = self.snapshot()
        try:
            stack = [snap._root]
            while stack:
                node = stack.pop()
                if node is None:
                    continue
                # in-flight writers ahead of the snapshot may still hold it
                _lock(node, 0)
                elem, left, right = node.elem, node.left, node.right
                _unlock(node, 0)
                stack.append(right)
                stack.append(left)
                yield elem
        finally:
            snap.release()

    def sum(self, start=0):
        total = start
        for x in self.iterate():
            total += x
        return total

    def size(self) -> int:
        return sum(1 for _ in self.iterate())

    def sum_smallest(self, k: int, start=0):
        """Sum of the ``k`` smallest elements, drained from a private snapshot."""
        snap = self.snapshot()
        try:
            total = start
            for _ in range(k):
                x = snap.remove_min()
                if x is None:
                    break
                total += x
            return total
        finally:
            snap.release()

    def to_sorted_list(self) -> list:
        snap = self.snapshot()
        out = []
        try:
            while True:
                x = snap.remove_min()
                if x is None:
                    return out
                out.append(x)
        finally:
            snap.release()

    # quiescent inspection ---------------------------------------------------
    @property
    def root(self) -> Optional[SnapNode]:
        """Current root node. Only meaningful when no operation is running."""
        return self._root

    def freeze(self) -> Optional[Node]:
        """Copy the current tree into persistent nodes (quiescent use only)."""
        def conv(n):
            if n is None:
                return None
            return Node(n.elem, conv(n.left), conv(n.right))
        return conv(self._root)


def drain(heap) -> list:
    """Sorted contents of ``heap`` without modifying it."""
    return heap.to_sorted_list()


def iter_nodes(root: Optional[SnapNode]) -> Iterator[tuple[str, SnapNode]]:
    """Pre-order ``(path, node)`` pairs; quiescent use only."""
    stack: list[tuple[str, Any]] = [("root", root)]
    while stack:
        path, node = stack.pop()
        if node is None:
            continue
        yield path, node
        stack.append((path + ".R", node.right))
        stack.append((path + ".L", node.left))
