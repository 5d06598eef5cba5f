"""Quiescent structural checks over one or more concurrent heap handles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from ..concurrent_heap import CHeap, SnapNode


@dataclass(frozen=True)
class Diagnostic:
    handle: int
    path: str
    message: str

    def __str__(self):
        return f"handle {self.handle} at {self.path}: {self.message}"


def invariant_sweep(handles: Union[CHeap, Iterable[CHeap]]) -> list[Diagnostic]:
    """Check Braun shape, heap order and snapshot counts.

    A node reachable through ``r`` distinct references (parent slots plus
    handle roots) must have ``snap_count >= r - 1``, otherwise some writer
    could mutate it in place under another heap. Only call this when no
    operation is in flight. An empty result means clean.
    """
    if isinstance(handles, CHeap):
        handles = [handles]
    handles = [h for h in handles if not h.released]
    out: list[Diagnostic] = []
    sizes: dict[int, int] = {}
    refs: dict[int, int] = {}
    where: dict[int, tuple[int, str, SnapNode]] = {}

    def size_of(node) -> int:
        if node is None:
            return 0
        key = id(node)
        if key not in sizes:
            # iterative post-order; shared subtrees are measured once
            stack = [(node, False)]
            while stack:
                n, done = stack.pop()
                if n is None or id(n) in sizes:
                    continue
                if done:
                    sizes[id(n)] = 1 + sizes.get(id(n.left), 0) + sizes.get(id(n.right), 0)
                else:
                    stack.append((n, True))
                    stack.append((n.left, False))
                    stack.append((n.right, False))
        return sizes[key]

    seen_edges: set = set()
    for hi, h in enumerate(handles):
        root = h.root
        if root is None:
            continue
        refs[id(root)] = refs.get(id(root), 0) + 1
        where.setdefault(id(root), (hi, "root", root))
        stack = [("root", root)]
        visited: set = set()
        while stack:
            path, n = stack.pop()
            if id(n) in visited:
                out.append(Diagnostic(hi, path, "node reached twice within one heap"))
                continue
            visited.add(id(n))
            if n.snap_count < 0:
                out.append(Diagnostic(hi, path, f"negative snap_count {n.snap_count}"))
            nl, nr = size_of(n.left), size_of(n.right)
            if not nr <= nl <= nr + 1:
                out.append(Diagnostic(hi, path, f"not Braun (|left|={nl}, |right|={nr})"))
            for side, child in (("L", n.left), ("R", n.right)):
                if child is None:
                    continue
                if child.elem < n.elem:
                    out.append(Diagnostic(
                        hi, path, f"heap order broken ({n.elem!r} > {side} child {child.elem!r})"))
                edge = (id(n), side)
                if edge not in seen_edges:
                    seen_edges.add(edge)
                    refs[id(child)] = refs.get(id(child), 0) + 1
                    where.setdefault(id(child), (hi, f"{path}.{side}", child))
                stack.append((f"{path}.{side}", child))

    for key, count in refs.items():
        hi, path, node = where[key]
        if node.snap_count < count - 1:
            out.append(Diagnostic(
                hi, path, f"shared by {count} references but snap_count={node.snap_count}"))
    return out
