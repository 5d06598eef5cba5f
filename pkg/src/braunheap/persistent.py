"""Immutable Braun heap.

Every operation returns a new tree and leaves its input untouched, so any
value held by a caller is a snapshot for free. This module is the reference
behaviour the concurrent heap is tested against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, NamedTuple, Optional


class BraunStructureError(RuntimeError):
    """A node has an empty left child but a non-empty right child."""


class Node(NamedTuple):
    elem: Any
    left: Optional["Node"] = None
    right: Optional["Node"] = None


# The empty tree is plain ``None``.
HeapNode = Optional[Node]


def insert(n: HeapNode, x) -> Node:
    if n is None:
        return Node(x)
    if x < n.elem:
        smaller, larger = x, n.elem
    else:
        smaller, larger = n.elem, x
    # swap, then insert into the new left (the old right)
    return Node(smaller, insert(n.right, larger), n.left)


def pull_up_left(n: Node, is_root: bool = False) -> tuple[HeapNode, Any]:
    """Remove the leftmost leaf, swapping children on the way down.

    Returns ``(subtree, removed)``. On a lone root the removed value is
    ``None``; the caller then empties the heap itself.
    """
    if n.left is None:
        return None, (None if is_root else n.elem)
    new_right, value = pull_up_left(n.left)
    return Node(n.elem, n.right, new_right), value


def push_down(n: Node) -> Node:
    left, right = n.left, n.right
    if left is None and right is None:
        return n
    if right is None:
        if left.elem < n.elem:
            return Node(left.elem, Node(n.elem, left.left, left.right), None)
        return n
    if left is None:
        raise BraunStructureError("This tree is not Braun")
    if n.elem <= left.elem and n.elem <= right.elem:
        return n
    if left.elem <= right.elem:
        return Node(left.elem, push_down(Node(n.elem, left.left, left.right)), right)
    return Node(right.elem, left, push_down(Node(n.elem, right.left, right.right)))


def size(n: HeapNode) -> int:
    if n is None:
        return 0
    return 1 + size(n.left) + size(n.right)


def depth(n: HeapNode) -> int:
    if n is None:
        return 0
    return 1 + max(depth(n.left), depth(n.right))


def elements(n: HeapNode) -> Iterator:
    stack = [n]
    while stack:
        cur = stack.pop()
        if cur is not None:
            yield cur.elem
            stack.append(cur.right)
            stack.append(cur.left)


def find_violation(n: HeapNode, path: str = "root") -> Optional[str]:
    """Return a description of the first Braun or heap violation, or None."""
    if n is None:
        return None
    nl, nr = size(n.left), size(n.right)
    if not nr <= nl <= nr + 1:
        return f"{path}: not Braun (|left|={nl}, |right|={nr})"
    for side, child in (("L", n.left), ("R", n.right)):
        if child is not None and child.elem < n.elem:
            return f"{path}: heap order broken ({n.elem!r} > {side} child {child.elem!r})"
    return find_violation(n.left, path + ".L") or find_violation(n.right, path + ".R")


@dataclass(frozen=True)
class PHeap:
    """Holder for a persistent Braun heap root."""

    root: HeapNode = None

    @classmethod
    def from_iterable(cls, xs) -> "PHeap":
        h = cls()
        for x in xs:
            h = h.insert(x)
        return h

    def insert(self, x) -> "PHeap":
        return PHeap(insert(self.root, x))

    def get_min(self):
        return None if self.root is None else self.root.elem

    def remove_min(self) -> tuple["PHeap", Any]:
        root = self.root
        if root is None:
            return self, None
        rest, pulled = pull_up_left(root, is_root=True)
        if rest is None:
            return PHeap(None), root.elem
        return PHeap(push_down(Node(pulled, rest.left, rest.right))), root.elem

    def size(self) -> int:
        return size(self.root)

    __len__ = size

    def is_empty(self) -> bool:
        return self.root is None

    def validate(self) -> Optional[str]:
        return find_violation(self.root)

    def to_sorted_list(self) -> list:
        out = []
        h = self
        while h.root is not None:
            h, x = h.remove_min()
            out.append(x)
        return out

    def __iter__(self):
        return elements(self.root)
