"""Run a benchmark matrix file and write the CSV next to it.

    python3 scripts/run_matrix.py scripts/smoke_matrix.txt
    python3 scripts/run_matrix.py scripts/full_matrix.txt --init-size 16384 --runs 5
"""
import argparse
import logging
import sys
from pathlib import Path

from braunheap.bench import ConfigError, emit_csv, parse_matrix, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("matrix", type=Path)
    ap.add_argument("--init-size", type=int)
    ap.add_argument("--ops", type=int)
    ap.add_argument("--warmup", type=int)
    ap.add_argument("--runs", type=int)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    defaults = {k: v for k, v in dict(init_size=args.init_size, total_ops=args.ops,
                                      warmup_runs=args.warmup, measured_runs=args.runs).items()
                if v is not None}
    try:
        configs = parse_matrix(args.matrix.read_text(), defaults)
    except ConfigError as e:
        sys.exit(f"error: {e}")

    def progress(i, n, cfg):
        logging.info("[%d/%d] %s", i, n, ",".join(map(str, cfg.key)))

    text = emit_csv(sweep(configs, progress=progress))
    out = args.out or args.matrix.with_suffix(".csv")
    out.write_text(text)
    print(text, end="")
    logging.info("wrote %s", out)


if __name__ == "__main__":
    main()
