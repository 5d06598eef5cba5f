"""Benchmark runner for the six priority-queue workloads.

    python -m braunheap.bench --task mixed --structure braun --threads 1,2,4 \
        --init-size 65536 --runs 5 --warmup 1 --out mixed.csv

Each run rebuilds the structure from the same seeded initial contents,
releases ``threads`` workers from a barrier, and times the parallel region
with a monotonic clock. Warmup runs are discarded.
"""
from __future__ import annotations

import argparse
import gc
import itertools
import logging
import statistics
import sys
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .baseline import LockedArrayHeap
from .concurrent_heap import AllocStats, CHeap

log = logging.getLogger(__name__)

TASKS = ("sum", "snap-insert", "mixed", "snap-only", "insert", "remove-min")
STRUCTURES = ("braun", "locked-array")
DEFAULT_THREADS = (1, 2, 4, 8)

# mixed task: P(insert) = P(remove_min) = 3/8, P(sum of 1024 smallest) = 1/4
P_INSERT = 3 / 8
P_REMOVE = 3 / 8
SUM_PREFIX = 1024

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    task: str
    structure: str
    threads: int = 1
    init_size: int = 1 << 20
    total_ops: int = 1344
    warmup_runs: int = 10
    measured_runs: int = 40
    seed: int = 42

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {', '.join(TASKS)}")
        if self.structure not in STRUCTURES:
            raise ConfigError(
                f"unknown structure {self.structure!r}; expected one of {', '.join(STRUCTURES)}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.init_size < 1:
            raise ConfigError("init_size must be >= 1")
        if self.total_ops < 1 or self.total_ops % self.threads:
            raise ConfigError(
                f"ops ({self.total_ops}) must be a positive multiple of threads ({self.threads})")
        if self.warmup_runs < 0 or self.measured_runs < 1:
            raise ConfigError("need warmup >= 0 and runs >= 1")

    @property
    def ops_per_thread(self) -> int:
        return self.total_ops // self.threads

    @property
    def key(self) -> tuple:
        return (self.task, self.structure, self.threads)


@dataclass
class BenchResult:
    config: BenchConfig
    mean_ms: float
    std_ms: float
    per_run_ms: list[float]
    alloc_stats: Optional[tuple[int, int]] = None  # (allocated, peeled) over measured runs
    op_counts: Counter = field(default_factory=Counter)  # over measured runs
    per_thread_ops: list[list[int]] = field(default_factory=list)  # one list per measured run
    final_size: Optional[int] = None  # after the last measured run


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def initial_values(cfg: BenchConfig) -> list[int]:
    """Sorted initial contents; identical for every run of a config."""
    vals = _rng(cfg.seed, 0).integers(INT64_MIN, INT64_MAX, size=cfg.init_size,
                                      dtype=np.int64, endpoint=True)
    vals.sort()
    return vals.tolist()


@dataclass(frozen=True)
class ThreadPlan:
    kinds: tuple[str, ...]
    values: tuple[int, ...]


def thread_plan(cfg: BenchConfig, run: int, thread: int) -> ThreadPlan:
    """Operation stream for one worker; depends only on (seed, run, thread)."""
    rng = _rng(cfg.seed, 1, run, thread)
    k = cfg.ops_per_thread
    if cfg.task in ("sum", "snap-only"):
        return ThreadPlan((), ())
    if cfg.task == "remove-min":
        return ThreadPlan(("remove_min",) * k, ())
    if cfg.task == "mixed":
        draws = rng.random(k)
        kinds = tuple("insert" if d < P_INSERT else "remove_min" if d < P_INSERT + P_REMOVE
                      else "sum_prefix" for d in draws)
    else:
        kinds = ("insert",) * k
    values = rng.integers(INT64_MIN, INT64_MAX, size=k, dtype=np.int64, endpoint=True).tolist()
    return ThreadPlan(kinds, tuple(values))


def build(cfg: BenchConfig, values: Sequence[int], stats: Optional[AllocStats] = None):
    enabled = gc.isenabled()
    gc.disable()
    try:
        if cfg.structure == "braun":
            return CHeap.from_sorted(values, stats=stats)
        return LockedArrayHeap.from_sorted(values)
    finally:
        if enabled:
            gc.enable()


def snapshot_latency_ns(pq, trials: int = 201) -> float:
    """Median wall time of ``snapshot()`` on an already built structure."""
    samples = []
    for _ in range(trials):
        t0 = time.perf_counter_ns()
        s = pq.snapshot()
        samples.append(time.perf_counter_ns() - t0)
        s.release()
    return statistics.median(samples)


def _work(cfg: BenchConfig, pq, plan: ThreadPlan, keep: list, counts: Counter):
    task = cfg.task
    if task == "sum":
        pq.sum()
        counts["sum"] += 1
    elif task == "snap-only":
        keep.append(pq.snapshot())
        counts["snapshot"] += 1
    elif task == "snap-insert":
        snap = pq.snapshot()
        keep.append(snap)
        counts["snapshot"] += 1
        for v in plan.values:
            snap.insert(v)
        counts["insert"] += len(plan.values)
    else:
        values = plan.values
        for i, kind in enumerate(plan.kinds):
            if kind == "insert":
                pq.insert(values[i])
            elif kind == "remove_min":
                pq.remove_min()
            else:
                pq.sum_smallest(SUM_PREFIX)
            counts[kind] += 1


def _budgeted(cfg: BenchConfig, counts: Counter) -> int:
    if cfg.task in ("sum", "snap-only"):
        return sum(counts.values())
    return counts["insert"] + counts["remove_min"] + counts["sum_prefix"]


def run_once(cfg: BenchConfig, values: Sequence[int], run: int,
             stats: Optional[AllocStats] = None, measure_size: bool = False):
    """One timed run. Returns (millis, per-thread Counters, final size or None)."""
    pq = build(cfg, values, stats)
    plans = [thread_plan(cfg, run, t) for t in range(cfg.threads)]
    counts = [Counter() for _ in range(cfg.threads)]
    keep: list = []
    errors: list = []
    barrier = threading.Barrier(cfg.threads + 1)

    def worker(t: int):
        try:
            barrier.wait()
            _work(cfg, pq, plans[t], keep, counts[t])
        except BaseException as e:
            errors.append(e)

    threads = [threading.Thread(target=worker, args=(t,), name=f"bench-{t}")
               for t in range(cfg.threads)]
    for th in threads:
        th.start()
    barrier.wait()
    start = time.perf_counter()
    for th in threads:
        th.join()
    elapsed = (time.perf_counter() - start) * 1000.0
    if errors:
        raise errors[0]
    for snap in keep:
        snap.release()
    size = pq.size() if measure_size else None
    return elapsed, counts, size


def run_task(cfg: BenchConfig, values: Optional[Sequence[int]] = None) -> BenchResult:
    if values is None:
        values = initial_values(cfg)
    for run in range(cfg.warmup_runs):
        run_once(cfg, values, run)
        gc.collect()
    per_run = []
    totals: Counter = Counter()
    per_thread = []
    stats = AllocStats() if cfg.structure == "braun" else None
    final_size = None
    for i in range(cfg.measured_runs):
        last = i == cfg.measured_runs - 1
        ms, counts, size = run_once(cfg, values, cfg.warmup_runs + i, stats,
                                    measure_size=last and cfg.task in ("insert", "remove-min"))
        per_run.append(ms)
        per_thread.append([_budgeted(cfg, c) for c in counts])
        for c in counts:
            totals.update(c)
        if last:
            final_size = size
        gc.collect()
    std = statistics.stdev(per_run) if len(per_run) > 1 else 0.0
    return BenchResult(
        config=cfg,
        mean_ms=statistics.fmean(per_run),
        std_ms=std,
        per_run_ms=per_run,
        alloc_stats=stats.read() if stats is not None else None,
        op_counts=totals,
        per_thread_ops=per_thread,
        final_size=final_size,
    )


CSV_HEADER = "task,structure,threads,init_size,mean_ms,std_ms"


def emit_csv(results: Iterable[BenchResult]) -> str:
    lines = [CSV_HEADER]
    for r in sorted(results, key=lambda r: r.config.key):
        c = r.config
        lines.append(f"{c.task},{c.structure},{c.threads},{c.init_size},"
                     f"{r.mean_ms:.4f},{r.std_ms:.4f}")
    return "\n".join(lines) + "\n"


def sweep(configs: Iterable[BenchConfig],
          progress: Optional[Callable[[int, int, BenchConfig], None]] = None) -> list[BenchResult]:
    """Run each distinct config once, in first-seen order."""
    unique = list(dict.fromkeys(configs))
    results = []
    cache: dict = {}
    for i, cfg in enumerate(unique, start=1):
        if progress is not None:
            progress(i, len(unique), cfg)
        else:
            log.info("[%d/%d] %s %s t=%d", i, len(unique), cfg.task, cfg.structure, cfg.threads)
        vkey = (cfg.seed, cfg.init_size)
        if vkey not in cache:
            cache.clear()
            cache[vkey] = initial_values(cfg)
        results.append(run_task(cfg, cache[vkey]))
    return results


# matrix files -------------------------------------------------------------------

_KEYS = {
    "task": ("task", str),
    "structure": ("structure", str),
    "threads": ("threads", int),
    "init_size": ("init_size", int),
    "ops": ("total_ops", int),
    "total_ops": ("total_ops", int),
    "warmup": ("warmup_runs", int),
    "warmup_runs": ("warmup_runs", int),
    "runs": ("measured_runs", int),
    "measured_runs": ("measured_runs", int),
    "seed": ("seed", int),
}


def _expand(base: dict, assignments: dict[str, list]) -> list[BenchConfig]:
    names = list(assignments)
    out = []
    for combo in itertools.product(*(assignments[n] for n in names)):
        out.append(BenchConfig(**{**base, **dict(zip(names, combo))}))
    return out


def parse_matrix(text: str, defaults: Optional[dict] = None) -> list[BenchConfig]:
    """Parse ``key=value`` lines; comma lists expand to a cartesian product.

    Keys missing from a line fall back to ``defaults`` (BenchConfig field
    names); ``task=all`` / ``structure=all`` expand to every choice.
    """
    defaults = dict(defaults or {})
    configs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        assignments: dict[str, list] = {}
        for token in line.split():
            key, sep, value = token.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in _KEYS:
                raise ConfigError(f"line {lineno}: cannot parse {token!r}")
            name, conv = _KEYS[key]
            try:
                assignments[name] = _values(name, value, conv)
            except ValueError as e:
                raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from e
        base = {k: v for k, v in defaults.items() if k not in assignments}
        for req in ("task", "structure"):
            if req not in assignments and req not in base:
                raise ConfigError(f"line {lineno}: missing {req}")
        configs.extend(_expand(base, assignments))
    return configs


def _values(name: str, value: str, conv) -> list:
    if name == "task" and value == "all":
        return list(TASKS)
    if name == "structure" and value == "all":
        return list(STRUCTURES)
    return [conv(v) for v in value.split(",") if v]


# CLI ----------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="python -m braunheap.bench",
                                description="Time priority-queue workloads and emit CSV.")
    p.add_argument("--task", default="all",
                   help=f"comma list of {{{','.join(TASKS)}}} or 'all' (default)")
    p.add_argument("--structure", default="all",
                   help="comma list of {braun,locked-array} or 'all' (default)")
    p.add_argument("--threads", default=",".join(map(str, DEFAULT_THREADS)),
                   help="comma list of thread counts (default 1,2,4,8)")
    p.add_argument("--init-size", type=int, default=1 << 20)
    p.add_argument("--ops", type=int, default=1344)
    p.add_argument("--warmup", type=int, default=10)
    p.add_argument("--runs", type=int, default=40)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--sweep", metavar="MATRIX",
                   help="file of key=value config lines; other flags become defaults")
    p.add_argument("-q", "--quiet", action="store_true", help="no progress output")
    return p


def configs_from_args(args) -> list[BenchConfig]:
    defaults = {
        "init_size": args.init_size, "total_ops": args.ops, "warmup_runs": args.warmup,
        "measured_runs": args.runs, "seed": args.seed,
    }
    if args.sweep:
        with open(args.sweep) as f:
            text = f.read()
        return parse_matrix(text, _flag_defaults(args, defaults))
    line = f"task={args.task} structure={args.structure} threads={args.threads}"
    return parse_matrix(line, defaults)


def _flag_defaults(args, defaults: dict) -> dict:
    # single-valued flags can serve as defaults for matrix lines
    out = dict(defaults)
    for name, value in (("task", args.task), ("structure", args.structure)):
        if value != "all" and "," not in value:
            out[name] = value
    if "," not in args.threads:
        out["threads"] = int(args.threads)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        configs = configs_from_args(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: cannot read matrix file: {e}", file=sys.stderr)
        return 2
    text = emit_csv(sweep(configs))
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
