"""Concurrent Braun heaps with O(1) copy-on-write snapshots."""
from .baseline import LockedArrayHeap
from .concurrent_heap import AllocStats, CHeap, ReleasedHandleError, SnapNode, lock_order_checking
from .persistent import BraunStructureError, Node, PHeap

__all__ = [
    "AllocStats", "BraunStructureError", "CHeap", "LockedArrayHeap", "Node", "PHeap",
    "ReleasedHandleError", "SnapNode", "lock_order_checking",
]
