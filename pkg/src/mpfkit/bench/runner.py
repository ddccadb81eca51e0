"""Timed element-wise and matrix-product sweeps producing CSV-ready records."""
from __future__ import annotations

import csv
import itertools
import statistics
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .._backend import HAVE_NUMBA, backend_name, use_backend
from ..linalg import ALGORITHMS, KernelVariant, MPMatrix, OpCounter, ew_op, matmul
from ..mpf import DEFAULT_OPS, Precision
from ..oracle import loss_digits, max_rel_err, o_matmul
from .generators import gen_paper_matrices, make_rng, random_matrix

DEFAULT_SIZES = (64, 128, 256, 512, 1024)
PAPER_SIZES = (1023, 1024, 1025, 2047, 2048, 2049, 4095, 4096, 4097)
BACKENDS = ("numba", "numpy")


class DeterminismError(RuntimeError):
    """Two runs that must agree bit for bit did not."""


@dataclass
class BenchConfig:
    precisions: tuple[Precision, ...] = tuple(Precision)
    algorithms: tuple[str, ...] = ALGORITHMS
    variants: tuple[KernelVariant, ...] = tuple(KernelVariant)
    sizes: tuple[int, ...] = DEFAULT_SIZES
    n_min: int = 32
    cutoff: int = 64
    workers: tuple[int, ...] = (1,)
    reps: int = 5
    seed: int = 0
    oracle_max: int = 64
    out: str | None = None
    paper_matrices: bool = True
    backends: tuple[str, ...] = field(default_factory=lambda: (backend_name(),))
    ew_min_ops: int = 1 << 16

    def __post_init__(self):
        self.precisions = tuple(Precision.parse(p) for p in self.precisions)
        self.variants = tuple(KernelVariant.parse(v) for v in self.variants)
        self.sizes = tuple(int(n) for n in self.sizes)
        self.workers = tuple(int(w) for w in self.workers)
        self.validate()

    def validate(self) -> None:
        checks = [
            (self.precisions, "at least one precision is required"),
            (self.algorithms, "at least one algorithm is required"),
            (self.variants, "at least one variant is required"),
            (self.sizes, "at least one size is required"),
            (self.workers, "at least one worker count is required"),
            (self.backends, "at least one backend is required"),
            (all(n >= 1 for n in self.sizes), "sizes must be >= 1"),
            (all(w >= 1 for w in self.workers), "worker counts must be >= 1"),
            (self.reps >= 1, "reps must be >= 1"),
            (self.n_min >= 1, "n_min must be >= 1"),
            (self.cutoff >= 1, "cutoff must be >= 1"),
            (self.oracle_max >= 0, "oracle_max must be >= 0"),
            (self.ew_min_ops >= 1, "ew_min_ops must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        for b in self.backends:
            if b not in BACKENDS:
                raise ValueError(f"unknown backend {b!r}")
            if b == "numba" and not HAVE_NUMBA:
                raise ValueError("numba backend requested but numba is not installed")


@dataclass
class BenchRecord:
    case_id: str
    kind: str
    backend: str
    precision: str
    algorithm: str
    variant: str
    n: int
    workers: int
    seconds: float
    mflops: float
    op_count: int
    max_rel_err: float | None = None
    digits_lost: float | None = None
    is_min: bool = False


COLUMNS = tuple(f.name for f in fields(BenchRecord))
TIMING_COLUMNS = ("seconds", "mflops", "is_min")


@dataclass
class BenchReport:
    records: list[BenchRecord] = field(default_factory=list)

    def extend(self, other: BenchReport) -> BenchReport:
        self.records.extend(other.records)
        return self

    def select(self, **match) -> list[BenchRecord]:
        return [r for r in self.records if all(getattr(r, k) == v for k, v in match.items())]

    def mark_minima(self) -> None:
        groups: dict[tuple, list[BenchRecord]] = {}
        for r in self.records:
            groups.setdefault((r.kind, r.backend, r.precision, r.algorithm if r.kind == "ewise" else "",
                               r.n), []).append(r)
        for rs in groups.values():
            best = min(rs, key=lambda r: r.seconds)
            for r in rs:
                r.is_min = r is best


def _time(fn, reps: int) -> tuple[float, object]:
    result = fn()  # warm-up, also compiles
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), result


def _mflops(ops: int, seconds: float) -> float:
    return ops / (1e6 * seconds) if seconds > 0 else float("inf")


def ewise_ops(precision: Precision) -> list[tuple[str, str]]:
    """(label, kernel) pairs timed per precision; triple-double adds both addition kinds."""
    ops = DEFAULT_OPS[precision]
    rows = [("add", ops["add"]), ("mul", ops["mul"])]
    if precision is Precision.TD:
        rows.insert(1, ("add", "td_add_merge"))
    return rows


def run_ewise_bench(cfg: BenchConfig) -> BenchReport:
    """Element-wise add/mul on seeded ``1 x n`` vectors for every variant."""
    report = BenchReport()
    for backend, prec, n in itertools.product(cfg.backends, cfg.precisions, cfg.sizes):
        rng = make_rng(cfg.seed, 1, prec.width, n)
        a = random_matrix(rng, prec, 1, n)
        b = random_matrix(rng, prec, 1, n)
        passes = max(1, cfg.ew_min_ops // n)
        with use_backend(backend):
            for label, kernel in ewise_ops(prec):
                reference = None
                for variant in cfg.variants:
                    def run(kernel=kernel, variant=variant):
                        out = None
                        for _ in range(passes):
                            out = ew_op(kernel, a, b, variant)
                        return out
                    secs, out = _time(run, cfg.reps)
                    if reference is None:
                        reference = out
                    elif not out.bit_equal(reference):
                        raise DeterminismError(f"{kernel} n={n}: variant {variant.value} differs")
                    report.records.append(BenchRecord(
                        case_id=f"ewise/{backend}/{prec.name}/{kernel}/{variant.value}/{n}",
                        kind="ewise", backend=backend, precision=prec.name, algorithm=kernel,
                        variant=variant.value, n=n, workers=1, seconds=secs,
                        mflops=_mflops(n * passes, secs), op_count=n * passes))
    report.mark_minima()
    return report


def _inputs(cfg: BenchConfig, prec: Precision, n: int) -> tuple[MPMatrix, MPMatrix]:
    if cfg.paper_matrices:
        return gen_paper_matrices(n, prec)
    rng = make_rng(cfg.seed, 2, prec.width, n)
    return random_matrix(rng, prec, n, n), random_matrix(rng, prec, n, n)


def classical_op_count(m: int, k: int, n: int) -> int:
    return m * k * n + m * n * max(k - 1, 0)


def run_matmul_bench(cfg: BenchConfig) -> BenchReport:
    """Time every (backend, precision, n, algorithm, variant, workers) cell.

    Before timing, each threaded run is checked bit for bit against the serial
    run of the same cell.  Accuracy columns are filled when ``n`` is within
    ``oracle_max``.
    """
    report = BenchReport()
    for prec, n in itertools.product(cfg.precisions, cfg.sizes):
        A, B = _inputs(cfg, prec, n)
        exact = o_matmul(A.to_dyadic(), B.to_dyadic(), max_n=n) if n <= cfg.oracle_max else None
        for backend in cfg.backends:
            with use_backend(backend):
                for algo, variant in itertools.product(cfg.algorithms, cfg.variants):
                    serial = None
                    accuracy: tuple[float | None, float | None] = (None, None)
                    for w in cfg.workers:
                        if algo == "naive" and w > 1:
                            continue

                        def run(algo=algo, variant=variant, w=w, counter=None):
                            return matmul(A, B, algo, variant, cfg.n_min, cfg.cutoff, w, counter)

                        counter = OpCounter()
                        result = run(counter=counter)
                        if serial is None:
                            serial = result if w == 1 else run(w=1)
                            if exact is not None:
                                err = max_rel_err(serial, exact)
                                accuracy = (err, loss_digits(err, prec))
                        if not result.bit_equal(serial):
                            raise DeterminismError(
                                f"{algo}/{variant.value} {prec.name} n={n}: workers={w} differs from serial")
                        ops = counter.ops if algo == "strassen" else classical_op_count(n, n, n)
                        secs, _ = _time(run, cfg.reps)
                        report.records.append(BenchRecord(
                            case_id=f"matmul/{backend}/{prec.name}/{algo}/{variant.value}/{n}/{w}",
                            kind="matmul", backend=backend, precision=prec.name, algorithm=algo,
                            variant=variant.value, n=n, workers=w, seconds=secs,
                            mflops=_mflops(ops, secs), op_count=ops,
                            max_rel_err=accuracy[0], digits_lost=accuracy[1]))
    report.mark_minima()
    return report


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(report: BenchReport, path) -> None:
    """Write the report with a header row; floats use round-trip ``repr``."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(COLUMNS)
            for r in report.records:
                d = asdict(r)
                w.writerow([_cell(d[c]) for c in COLUMNS])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write benchmark CSV to {path}: {exc.strerror}") from exc
