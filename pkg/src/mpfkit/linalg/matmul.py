"""Elementwise ops and the naive, blocked and Strassen matrix products.

Every product initialises the accumulator to zero and performs
``c <- add(c, mul(a_ik, b_kj))`` with k ascending, so naive and blocked
results coincide bit for bit whatever the tile size or worker count.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .._backend import backend_name, portable, set_thread_backend
from ..mpf import DEFAULT_OPS
from . import _nb, _np
from .matrix import KernelVariant, MPMatrix

DEFAULT_VARIANT = KernelVariant.SIMD_LOADSTORE


@dataclass
class OpCounter:
    """Thread-safe tally of leaf products and multi-component operations."""

    leaf_calls: int = 0
    muls: int = 0
    adds: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def leaf(self, m: int, k: int, n: int) -> None:
        with self._lock:
            self.leaf_calls += 1
            self.muls += m * k * n
            self.adds += m * n * max(k - 1, 0)

    def elementwise(self, count: int) -> None:
        with self._lock:
            self.adds += count

    @property
    def ops(self) -> int:
        return self.muls + self.adds


# -- checks ------------------------------------------------------------------------

def _check_same(a: MPMatrix, b: MPMatrix) -> None:
    if a.precision is not b.precision:
        raise ValueError(f"precision mismatch: {a.precision.name} vs {b.precision.name}")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def _check_product(a: MPMatrix, b: MPMatrix) -> None:
    if a.precision is not b.precision:
        raise ValueError(f"precision mismatch: {a.precision.name} vs {b.precision.name}")
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")


def _check_positive(name: str, v: int) -> int:
    v = int(v)
    if v < 1:
        raise ValueError(f"{name} must be >= 1, got {v}")
    return v


# -- elementwise ----------------------------------------------------------------------

def ew_op(name: str, a: MPMatrix, b: MPMatrix, variant=DEFAULT_VARIANT) -> MPMatrix:
    """Apply the named kernel (e.g. ``"td_add_merge"``) element by element."""
    _check_same(a, b)
    variant = KernelVariant.parse(variant)
    if not name.startswith(a.precision.name.lower() + "_"):
        raise ValueError(f"kernel {name!r} does not operate on {a.precision.name} values")
    out = a.like()
    if portable():
        _np.ew(name, a.planes, b.planes, out.planes, a.cols, variant.code)
    else:
        kern = _nb.ew_kernel(name, a.width)
        kern(a.flat_planes(), b.flat_planes(), out.flat_planes(),
             a.rows, a.cols, a.stride, variant.code)
    out.clear_padding()
    return out


def _elementwise(op_kind: str, a: MPMatrix, b: MPMatrix, variant) -> MPMatrix:
    _check_same(a, b)
    return ew_op(DEFAULT_OPS[a.precision][op_kind], a, b, variant)


def ew_add(a: MPMatrix, b: MPMatrix, variant=DEFAULT_VARIANT) -> MPMatrix:
    return _elementwise("add", a, b, variant)


def ew_mul(a: MPMatrix, b: MPMatrix, variant=DEFAULT_VARIANT) -> MPMatrix:
    return _elementwise("mul", a, b, variant)


def mat_add(a: MPMatrix, b: MPMatrix, variant=DEFAULT_VARIANT) -> MPMatrix:
    return _elementwise("add", a, b, variant)


def mat_sub(a: MPMatrix, b: MPMatrix, variant=DEFAULT_VARIANT) -> MPMatrix:
    return _elementwise("sub", a, b, variant)


# -- tiled product core ----------------------------------------------------------------

def _tiles(rows: int, cols: int, bi: int, bj: int) -> np.ndarray:
    t = [(i, j) for i in range(0, rows, bi) for j in range(0, cols, bj)]
    return np.array(t, dtype=np.int64).reshape(-1, 2)


def _run(a: MPMatrix, b: MPMatrix, c: MPMatrix, tiles: np.ndarray, bi: int, bj: int, bk: int,
         variant: KernelVariant) -> None:
    ops = DEFAULT_OPS[a.precision]
    if len(tiles) == 0 or a.cols == 0:
        return
    if portable():
        _np.mm(ops["add"], ops["mul"], a.planes, b.planes, c.planes,
               b.cols, a.cols, tiles, bi, bj, bk, variant.code)
    else:
        kern = _nb.mm_kernel(ops["add"], ops["mul"], a.width)
        kern(a.flat_planes(), b.flat_planes(), c.flat_planes(), b.cols, a.cols,
             a.stride, b.stride, c.stride, tiles, bi, bj, bk, variant.code)


def _product(a, b, bi, bj, bk, variant, workers=1, counter=None) -> MPMatrix:
    _check_product(a, b)
    variant = KernelVariant.parse(variant)
    c = MPMatrix.zeros(a.precision, a.rows, b.cols)
    tiles = _tiles(a.rows, b.cols, bi, bj)
    if workers <= 1 or len(tiles) <= 1:
        _run(a, b, c, tiles, bi, bj, bk, variant)
    else:
        backend = backend_name()
        parts = [tiles[w::workers] for w in range(workers)]

        def task(part):
            set_thread_backend(backend)
            _run(a, b, c, part, bi, bj, bk, variant)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for f in [pool.submit(task, p) for p in parts if len(p)]:
                f.result()
    c.clear_padding()
    if counter is not None:
        counter.leaf(a.rows, a.cols, b.cols)
    return c


def matmul_naive(a: MPMatrix, b: MPMatrix, variant=DEFAULT_VARIANT,
                 counter: OpCounter | None = None) -> MPMatrix:
    """Row-major triple loop; each ``c_ij`` summed over ascending k."""
    return _product(a, b, max(a.rows, 1), max(b.cols, 1), max(a.cols, 1), variant,
                    counter=counter)


def matmul_block(a: MPMatrix, b: MPMatrix, n_min: int = 32, variant=DEFAULT_VARIANT,
                 counter: OpCounter | None = None) -> MPMatrix:
    """Cache-blocked product over ``n_min`` tiles; bit-identical to :func:`matmul_naive`."""
    n_min = _check_positive("n_min", n_min)
    return _product(a, b, n_min, n_min, n_min, variant, counter=counter)


def matmul_block_parallel(a: MPMatrix, b: MPMatrix, n_min: int = 32, variant=DEFAULT_VARIANT,
                          workers: int = 1, counter: OpCounter | None = None) -> MPMatrix:
    """:func:`matmul_block` with output tiles dealt round-robin to ``workers`` threads."""
    n_min = _check_positive("n_min", n_min)
    workers = _check_positive("workers", workers)
    return _product(a, b, n_min, n_min, n_min, variant, workers, counter)


# -- Strassen ---------------------------------------------------------------------------

def _strassen(a, b, cutoff, n_min, variant, counter, pool) -> MPMatrix:
    m, k, n = a.rows, a.cols, b.cols
    if max(m, k, n) <= cutoff or min(m, k, n) == 0:
        return matmul_block(a, b, n_min, variant, counter)
    mh, kh, nh = -(-m // 2), -(-k // 2), -(-n // 2)
    a11, a12 = a.block(0, mh, 0, kh), a.block(0, mh, kh, 2 * kh)
    a21, a22 = a.block(mh, 2 * mh, 0, kh), a.block(mh, 2 * mh, kh, 2 * kh)
    b11, b12 = b.block(0, kh, 0, nh), b.block(0, kh, nh, 2 * nh)
    b21, b22 = b.block(kh, 2 * kh, 0, nh), b.block(kh, 2 * kh, nh, 2 * nh)

    def add(x, y):
        if counter is not None:
            counter.elementwise(x.rows * x.cols)
        return mat_add(x, y, variant)

    def sub(x, y):
        if counter is not None:
            counter.elementwise(x.rows * x.cols)
        return mat_sub(x, y, variant)

    operands = [
        (add(a11, a22), add(b11, b22)),
        (add(a21, a22), b11),
        (a11, sub(b12, b22)),
        (a22, sub(b21, b11)),
        (add(a11, a12), b22),
        (sub(a21, a11), add(b11, b12)),
        (sub(a12, a22), add(b21, b22)),
    ]
    if pool is None:
        m1, m2, m3, m4, m5, m6, m7 = (
            _strassen(x, y, cutoff, n_min, variant, counter, None) for x, y in operands)
    else:
        backend = backend_name()

        def task(xy):
            set_thread_backend(backend)
            return _strassen(xy[0], xy[1], cutoff, n_min, variant, counter, None)

        m1, m2, m3, m4, m5, m6, m7 = [f.result() for f in [pool.submit(task, p) for p in operands]]

    c = MPMatrix.zeros(a.precision, m, n)
    c.put_block(0, 0, add(sub(add(m1, m4), m5), m7))
    c.put_block(0, nh, add(m3, m5))
    c.put_block(mh, 0, add(m2, m4))
    c.put_block(mh, nh, add(add(sub(m1, m2), m3), m6))
    c.clear_padding()
    return c


def matmul_strassen(a: MPMatrix, b: MPMatrix, cutoff: int = 64, n_min: int = 32,
                    variant=DEFAULT_VARIANT, counter: OpCounter | None = None) -> MPMatrix:
    """Seven-product Strassen recursion.

    Odd halves are zero-padded at each level and stripped on return.  Recursion
    stops once every dimension is at most ``cutoff`` and hands the leaf to
    :func:`matmul_block`.
    """
    _check_product(a, b)
    variant = KernelVariant.parse(variant)
    cutoff = _check_positive("cutoff", cutoff)
    n_min = _check_positive("n_min", n_min)
    return _strassen(a, b, cutoff, n_min, variant, counter, None)


def matmul_strassen_parallel(a: MPMatrix, b: MPMatrix, cutoff: int = 64, n_min: int = 32,
                             variant=DEFAULT_VARIANT, workers: int = 1,
                             counter: OpCounter | None = None) -> MPMatrix:
    """:func:`matmul_strassen` with the seven top-level products run on ``workers`` threads."""
    _check_product(a, b)
    variant = KernelVariant.parse(variant)
    cutoff = _check_positive("cutoff", cutoff)
    n_min = _check_positive("n_min", n_min)
    workers = _check_positive("workers", workers)
    if workers == 1:
        return _strassen(a, b, cutoff, n_min, variant, counter, None)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return _strassen(a, b, cutoff, n_min, variant, counter, pool)


ALGORITHMS = ("naive", "block", "strassen")


def matmul(a: MPMatrix, b: MPMatrix, algorithm: str = "block", variant=DEFAULT_VARIANT,
           n_min: int = 32, cutoff: int = 64, workers: int = 1,
           counter: OpCounter | None = None) -> MPMatrix:
    """Dispatch by algorithm name; ``workers > 1`` selects the threaded form."""
    if algorithm == "naive":
        return matmul_naive(a, b, variant, counter)
    if algorithm == "block":
        return matmul_block_parallel(a, b, n_min, variant, workers, counter)
    if algorithm == "strassen":
        return matmul_strassen_parallel(a, b, cutoff, n_min, variant, workers, counter)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
