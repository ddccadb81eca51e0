"""Time the compiled and portable backends side by side.

    python benchmarks/compare_backends.py [--sizes 64,128] [--out results.csv]

Prints one row per (precision, algorithm, variant, n) with the seconds taken by
each backend and their ratio.  Products are checked bit-identical across backends.
"""
from __future__ import annotations

import argparse
import sys

from mpfkit import use_backend
from mpfkit._backend import HAVE_NUMBA
from mpfkit.bench import BenchConfig, emit_csv, random_matrix
from mpfkit.bench.generators import make_rng
from mpfkit.bench.runner import run_matmul_bench
from mpfkit.linalg import matmul


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="64,128")
    p.add_argument("--precision", default="dd,td,qd")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--out")
    args = p.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is unavailable; nothing to compare", file=sys.stderr)
        return 1
    sizes = tuple(int(s) for s in args.sizes.split(","))
    precisions = tuple(args.precision.split(","))

    for prec in precisions:
        rng = make_rng(7, len(prec))
        a, b = random_matrix(rng, prec, sizes[0], sizes[0]), random_matrix(rng, prec, sizes[0], sizes[0])
        with use_backend("numba"):
            fast = matmul(a, b)
        with use_backend("numpy"):
            slow = matmul(a, b)
        if not fast.bit_equal(slow):
            print(f"{prec}: backends disagree", file=sys.stderr)
            return 4

    cfg = BenchConfig(precisions=precisions, sizes=sizes, reps=args.reps, oracle_max=0,
                      backends=("numba", "numpy"), paper_matrices=False)
    report = run_matmul_bench(cfg)
    rows = {}
    for r in report.records:
        rows.setdefault((r.precision, r.algorithm, r.variant, r.n), {})[r.backend] = r.seconds
    print(f"{'prec':5}{'algorithm':10}{'variant':11}{'n':>6}{'numba s':>11}{'numpy s':>11}{'ratio':>9}")
    for (prec, algo, var, n), t in sorted(rows.items()):
        print(f"{prec:5}{algo:10}{var:11}{n:>6}{t['numba']:>11.4f}{t['numpy']:>11.4f}"
              f"{t['numpy'] / t['numba']:>8.1f}x")
    if args.out:
        emit_csv(report, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
