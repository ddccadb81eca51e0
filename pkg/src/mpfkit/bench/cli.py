"""``mpfkit-bench`` command line."""
from __future__ import annotations

import argparse
import sys

from .._backend import HAVE_NUMBA, backend_name
from ..linalg import ALGORITHMS, KernelVariant
from ..mpf import Precision
from .runner import (
    BACKENDS, DEFAULT_SIZES, PAPER_SIZES, BenchConfig, BenchReport, DeterminismError, emit_csv,
    run_ewise_bench, run_matmul_bench,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_MISMATCH = 0, 2, 3, 4


def _choices(value: str, allowed: list[str], what: str) -> list[str]:
    items = [v.strip().lower() for v in value.split(",") if v.strip()]
    if items == ["all"]:
        return list(allowed)
    bad = [v for v in items if v not in allowed]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"invalid {what} {value!r}; choose from {', '.join(allowed)} or all")
    return items


def _ints(value: str) -> list[int]:
    try:
        out = [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {value!r}")
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpfkit-bench",
                                description="Time multi-component element-wise ops and matrix products.")
    p.add_argument("--suite", default="all", choices=["ewise", "matmul", "all"])
    p.add_argument("--precision", default="all",
                   type=lambda v: _choices(v, [x.name.lower() for x in Precision], "precision"))
    p.add_argument("--algo", default="all", type=lambda v: _choices(v, list(ALGORITHMS), "algorithm"))
    p.add_argument("--variant", default="all",
                   type=lambda v: _choices(v, [x.value for x in KernelVariant], "variant"))
    p.add_argument("--backend", default=backend_name(),
                   type=lambda v: _choices(v, list(BACKENDS) if HAVE_NUMBA else ["numpy"], "backend"))
    sizes = p.add_mutually_exclusive_group()
    sizes.add_argument("--sizes", type=_ints, default=list(DEFAULT_SIZES))
    sizes.add_argument("--paper-sizes", action="store_true",
                       help=f"use the large sizes {','.join(map(str, PAPER_SIZES))}")
    p.add_argument("--nmin", type=int, default=32)
    p.add_argument("--cutoff", type=int, default=64)
    p.add_argument("--workers", type=_ints, default=[1])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-max", type=int, default=64)
    p.add_argument("--out", default=None, help="CSV path (default: print CSV to stdout)")
    gen = p.add_mutually_exclusive_group()
    gen.add_argument("--paper-matrices", dest="paper", action="store_true", default=True)
    gen.add_argument("--random", dest="paper", action="store_false")
    return p


def config_from_args(args) -> BenchConfig:
    backend = args.backend if isinstance(args.backend, list) else [args.backend]
    return BenchConfig(
        precisions=tuple(args.precision), algorithms=tuple(args.algo), variants=tuple(args.variant),
        sizes=tuple(PAPER_SIZES if args.paper_sizes else args.sizes), n_min=args.nmin,
        cutoff=args.cutoff, workers=tuple(args.workers), reps=args.reps, seed=args.seed,
        oracle_max=args.oracle_max, out=args.out, paper_matrices=args.paper, backends=tuple(backend))


def _summary(report: BenchReport) -> str:
    lines = []
    for r in report.records:
        mark = "*" if r.is_min else " "
        acc = "" if r.digits_lost is None else f"  lost={r.digits_lost:.2f}"
        lines.append(f"{mark} {r.kind:6} {r.backend:5} {r.precision} {r.algorithm:12} {r.variant:9} "
                     f"n={r.n:<5} w={r.workers:<2} {r.seconds:10.5f}s {r.mflops:10.2f} MFLOPS{acc}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"mpfkit-bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = BenchReport()
    try:
        if args.suite in ("ewise", "all"):
            report.extend(run_ewise_bench(cfg))
        if args.suite in ("matmul", "all"):
            report.extend(run_matmul_bench(cfg))
    except DeterminismError as exc:
        print(f"mpfkit-bench: determinism check failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ValueError as exc:
        print(f"mpfkit-bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out is None:
        emit_csv(report, "/dev/stdout")
        return EXIT_OK
    try:
        emit_csv(report, cfg.out)
    except OSError as exc:
        print(f"mpfkit-bench: {exc}", file=sys.stderr)
        return EXIT_IO
    print(_summary(report))
    print(f"wrote {len(report.records)} records to {cfg.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
