"""Median snapshot latency against heap size for both structures.

The Braun column should stay flat while the array column grows with n.
"""
import argparse

from braunheap import CHeap, LockedArrayHeap
from braunheap.bench import BenchConfig, initial_values, snapshot_latency_ns


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-log2", type=int, default=20)
    ap.add_argument("--trials", type=int, default=101)
    args = ap.parse_args()

    values = initial_values(BenchConfig("snap-only", "braun", init_size=1 << args.max_log2))
    print("log2_n,braun_ns,locked_array_ns")
    for k in range(10, args.max_log2 + 1, 2):
        xs = values[:: 1 << (args.max_log2 - k)]
        b = snapshot_latency_ns(CHeap.from_sorted(xs), args.trials)
        a = snapshot_latency_ns(LockedArrayHeap.from_sorted(xs), min(args.trials, 31))
        print(f"{k},{b:.0f},{a:.0f}", flush=True)


if __name__ == "__main__":
    main()
