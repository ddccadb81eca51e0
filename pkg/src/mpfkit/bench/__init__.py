"""Benchmark harness: seeded generators, timed sweeps and CSV output."""
from .generators import gen_paper_matrices, make_rng, random_components, random_matrix
from .runner import (
    COLUMNS, BenchConfig, BenchRecord, BenchReport, DeterminismError, classical_op_count, emit_csv,
    ewise_ops, run_ewise_bench, run_matmul_bench,
)

__all__ = [
    "COLUMNS", "BenchConfig", "BenchRecord", "BenchReport", "DeterminismError",
    "classical_op_count", "emit_csv", "ewise_ops", "gen_paper_matrices", "make_rng",
    "random_components", "random_matrix", "run_ewise_bench", "run_matmul_bench",
]
