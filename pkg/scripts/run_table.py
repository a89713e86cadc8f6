"""Run the timing/error protocol over a grid of (N, r, k) and write a CSV.

The default grid divides eight reference (N, r, k) settings by 10 so that it
finishes in minutes on a laptop; ``--scale 1`` runs the full sizes.

    python scripts/run_table.py --out results/table.csv
    python scripts/run_table.py --scale 1 --reps 1 --out results/full.csv
"""
import argparse
import logging
import sys

from erasure_duals.bench import BenchConfig, ordering_warnings, run_suite

# reference (N, r, k) settings
GRID = [
    (6000, 4000, 200),
    (6000, 4000, 300),
    (6000, 4000, 500),
    (7000, 4000, 50),
    (5000, 4000, 200),
    (8000, 200, 80),
    (8000, 2000, 200),
    (8000, 6000, 500),
]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--scale", type=int, default=10, help="divide N, r, k by this")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="table.csv")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    configs = [
        BenchConfig(
            N=n // args.scale, r=r // args.scale, k=max(1, k // args.scale),
            seed=args.seed + i, repetitions=args.reps, warmup=args.warmup,
            threads=args.threads, test_id=f"test{i}",
        )
        for i, (n, r, k) in enumerate(GRID, start=1)
    ]
    records = run_suite(configs, args.out)
    for c, rec in zip(configs, records):
        t = rec.times
        print(f"{c.test_id}: N={c.N} r={c.r} k={c.k}  t1={t['t1']:.4f} t2={t['t2']:.4f} "
              f"t3={t['t3']:.4f}  e1={rec.errors['e1']:.2e}  {rec.status}")
        for msg in ordering_warnings(rec):
            print(f"  note: {msg}", file=sys.stderr)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
