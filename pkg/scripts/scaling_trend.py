"""Compare both structures at t=4 on snap-insert, mixed and sum.

Prints the mean time per run and which structure came out ahead.
Meaningful only on a machine with several cores.
"""
import argparse
import os

from braunheap.bench import BenchConfig, run_task


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--init-size", type=int, default=1 << 14)
    ap.add_argument("--runs", type=int, default=3)
    args = ap.parse_args()

    print(f"# cpus visible: {os.cpu_count()}")
    print("task,braun_ms,locked_array_ms,faster")
    for task in ("snap-insert", "mixed", "sum"):
        ms = {}
        for s in ("braun", "locked-array"):
            cfg = BenchConfig(task, s, threads=args.threads, init_size=args.init_size,
                              warmup_runs=1, measured_runs=args.runs)
            ms[s] = run_task(cfg).mean_ms
        faster = min(ms, key=ms.get)
        print(f"{task},{ms['braun']:.3f},{ms['locked-array']:.3f},{faster}", flush=True)


if __name__ == "__main__":
    main()
