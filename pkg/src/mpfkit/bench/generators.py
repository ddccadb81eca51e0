"""Seeded input generators for the benchmarks and tests."""
from __future__ import annotations

import math

import numpy as np

from ..linalg import MPMatrix
from ..mpf import Precision, from_f64, mul
from ..simd import np_renorm5

SQRT5 = math.sqrt(5.0)
SQRT3 = math.sqrt(3.0)


def make_rng(seed: int, *salt: int) -> np.random.Generator:
    """PCG64 stream keyed by ``seed`` plus case-specific integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, salt)])))


def random_components(rng: np.random.Generator, precision, shape, signed: bool = False) -> np.ndarray:
    """Normalized random values with leads uniform in [1, 2).

    Tails are drawn with shrinking magnitude and the whole expansion is passed
    once through the five-term renormalization, so every element satisfies the
    nonoverlap invariant.  Returns an array shaped ``(width, *shape)``.
    """
    precision = Precision.parse(precision)
    shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
    raw = [rng.uniform(1.0, 2.0, shape)]
    for _ in range(3):
        raw.append(raw[-1] * 2.0 ** -53 * rng.uniform(-1.0, 1.0, shape))
    comps = np.stack(np_renorm5(*raw, np.zeros(shape))[:precision.width])
    if signed:
        comps *= rng.choice([-1.0, 1.0], shape)
    return comps


def random_matrix(rng: np.random.Generator, precision, rows: int, cols: int,
                  signed: bool = False) -> MPMatrix:
    return MPMatrix.from_components(random_components(rng, precision, (rows, cols), signed), precision)


def gen_paper_matrices(n: int, precision) -> tuple[MPMatrix, MPMatrix]:
    """``A[i, j] = sqrt5 * (i + j - 1)`` and ``B[i, j] = sqrt3 * (n - i)`` with 1-based
    indices, multiplied out at the target precision from binary64 roundings of the roots."""
    if n < 1:
        raise ValueError("n must be >= 1")
    precision = Precision.parse(precision)
    r5, r3 = from_f64(SQRT5, precision), from_f64(SQRT3, precision)
    a_vals = [mul(r5, from_f64(float(s), precision)) for s in range(1, 2 * n)]
    b_vals = [mul(r3, from_f64(float(n - i), precision)) for i in range(1, n + 1)]
    a_comp = np.array([v.c for v in a_vals]).T
    b_comp = np.array([v.c for v in b_vals]).T
    ii, jj = np.indices((n, n))
    A = MPMatrix.from_components(a_comp[:, ii + jj], precision)
    B = MPMatrix.from_components(np.broadcast_to(b_comp[:, :, None], (precision.width, n, n)), precision)
    return A, B
