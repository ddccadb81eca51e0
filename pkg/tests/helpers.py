"""Shared sampling and reference helpers for the test suite."""
from __future__ import annotations

import numpy as np

from mpfkit.bench.generators import make_rng, random_components
from mpfkit.mpf import PACKED_TYPES, SCALAR_TYPES, Precision

BACKENDS = ("numba", "numpy")


def spread_floats(rng: np.random.Generator, size: int, emin: int = -60, emax: int = 60) -> np.ndarray:
    """Signed binary64 values with exponents spread over ``[emin, emax]``."""
    m = rng.uniform(1.0, 2.0, size) * rng.choice([-1.0, 1.0], size)
    return np.ldexp(m, rng.integers(emin, emax + 1, size))


def eft_pairs(rng: np.random.Generator, size: int, emin: int = -60, emax: int = 60):
    """Random pairs salted with awkward cases: zeros, equal and opposite values,
    powers of two, near-ties and short significands."""
    a = spread_floats(rng, size, emin, emax)
    b = spread_floats(rng, size, emin, emax)
    k = size // 16
    b[:k] = -a[:k]
    b[k:2 * k] = a[k:2 * k]
    a[2 * k:3 * k] = 0.0
    b[3 * k:4 * k] = np.ldexp(1.0, rng.integers(emin, emax + 1, k))
    a[4 * k:5 * k] = np.round(a[4 * k:5 * k] * 2.0 ** 20) * 2.0 ** -20
    b[5 * k:6 * k] = a[5 * k:6 * k] * (1 + 2.0 ** -52)
    b[6 * k:7 * k] = np.ldexp(a[6 * k:7 * k], -53)
    return a, b


def normalized(rng, precision, size, signed=False) -> np.ndarray:
    return random_components(rng, precision, (size,), signed)


def scalars(comps: np.ndarray, precision) -> list:
    cls = SCALAR_TYPES[Precision.parse(precision)]
    return [cls(*col) for col in comps.T.tolist()]


def packed(comps: np.ndarray, precision):
    return PACKED_TYPES[Precision.parse(precision)](*comps)


def bits(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64).view(np.int64)


def same_bits(x, y) -> bool:
    return bool(np.array_equal(bits(x), bits(y)))


__all__ = ["BACKENDS", "bits", "eft_pairs", "make_rng", "normalized", "packed", "same_bits",
           "scalars", "spread_floats"]
