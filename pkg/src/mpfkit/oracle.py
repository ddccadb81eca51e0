"""Exact dyadic-rational arithmetic used as ground truth by the test-suite and
the benchmark's accuracy columns.

A :class:`DyadicReal` is ``significand * 2**exponent`` with an arbitrary-size
integer significand.  Every finite binary64 value is dyadic, and sums and
products of dyadics stay dyadic, so nothing in here ever rounds except the
explicit conversions back to binary64.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DyadicReal", "MAX_SIGNIFICAND_BITS", "o_add", "o_sub", "o_mul", "o_neg",
    "o_from_components", "o_round_to_binary64", "o_rel_err", "o_matmul",
    "AbsoluteErrorRequired", "digit_loss", "loss_digits", "max_rel_err",
]

MAX_SIGNIFICAND_BITS = 1_000_000


class AbsoluteErrorRequired(ValueError):
    """Relative error asked for against an exact zero with a nonzero approximation."""


class DyadicReal:
    __slots__ = ("significand", "exponent")

    def __init__(self, significand: int = 0, exponent: int = 0):
        significand = int(significand)
        exponent = int(exponent)
        if significand == 0:
            exponent = 0
        else:
            tz = (significand & -significand).bit_length() - 1
            if tz:
                significand >>= tz
                exponent += tz
            if significand.bit_length() > MAX_SIGNIFICAND_BITS:
                raise OverflowError("DyadicReal significand exceeds the growth guard")
        self.significand = significand
        self.exponent = exponent

    @classmethod
    def from_float(cls, x: float) -> DyadicReal:
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} exactly")
        num, den = x.as_integer_ratio()
        return cls(num, 1 - den.bit_length())

    @classmethod
    def coerce(cls, x) -> DyadicReal:
        if isinstance(x, DyadicReal):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        if isinstance(x, Fraction):
            den = x.denominator
            if den & (den - 1):
                raise ValueError(f"{x} is not dyadic")
            return cls(x.numerator, 1 - den.bit_length())
        return cls.from_float(x)

    def __add__(self, other) -> DyadicReal:
        other = DyadicReal.coerce(other)
        if not self.significand:
            return other
        if not other.significand:
            return self
        d = self.exponent - other.exponent
        if d >= 0:
            return DyadicReal((self.significand << d) + other.significand, other.exponent)
        return DyadicReal(self.significand + (other.significand << -d), self.exponent)

    __radd__ = __add__

    def __neg__(self) -> DyadicReal:
        return DyadicReal(-self.significand, self.exponent)

    def __sub__(self, other) -> DyadicReal:
        return self + (-DyadicReal.coerce(other))

    def __rsub__(self, other) -> DyadicReal:
        return DyadicReal.coerce(other) - self

    def __mul__(self, other) -> DyadicReal:
        other = DyadicReal.coerce(other)
        return DyadicReal(self.significand * other.significand, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __abs__(self) -> DyadicReal:
        return DyadicReal(abs(self.significand), self.exponent)

    def __eq__(self, other) -> bool:
        try:
            other = DyadicReal.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.significand == other.significand and self.exponent == other.exponent

    def __hash__(self) -> int:
        return hash((self.significand, self.exponent))

    def __lt__(self, other) -> bool:
        return (self - other).significand < 0

    def __le__(self, other) -> bool:
        return (self - other).significand <= 0

    def __bool__(self) -> bool:
        return self.significand != 0

    def sign(self) -> int:
        return (self.significand > 0) - (self.significand < 0)

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.significand << self.exponent)
        return Fraction(self.significand, 1 << -self.exponent)

    def __float__(self) -> float:
        return o_round_to_binary64(self)

    def __repr__(self) -> str:
        return f"DyadicReal({self.significand}, {self.exponent})"


def o_add(a, b) -> DyadicReal:
    return DyadicReal.coerce(a) + b


def o_sub(a, b) -> DyadicReal:
    return DyadicReal.coerce(a) - b


def o_mul(a, b) -> DyadicReal:
    return DyadicReal.coerce(a) * b


def o_neg(a) -> DyadicReal:
    return -DyadicReal.coerce(a)


def o_from_components(c: Iterable[float]) -> DyadicReal:
    total = DyadicReal()
    for x in c:
        total = total + DyadicReal.from_float(x)
    return total


def o_round_to_binary64(x: DyadicReal) -> float:
    """Round to the nearest binary64, ties to even (subnormals included)."""
    m = x.significand
    if m == 0:
        return 0.0
    neg = m < 0
    m = -m if neg else m
    e = x.exponent
    nbits = m.bit_length()
    top = e + nbits - 1
    if top > 1023:
        raise OverflowError("value exceeds the binary64 range")
    if top >= -1022:
        shift = nbits - 53
    else:
        shift = -1074 - e
    if shift > 0:
        q = m >> shift
        rem = m - (q << shift)
        half = 1 << (shift - 1)
        if rem > half or (rem == half and q & 1):
            q += 1
        m, e = q, e + shift
    r = math.ldexp(float(m), e)  # exact: m fits in 54 bits
    return -r if neg else r


def o_rel_err(approx: Sequence[float], exact: DyadicReal) -> float:
    """``|sum(approx) - exact| / |exact|`` rounded up to the next binary64."""
    exact = DyadicReal.coerce(exact)
    diff = o_from_components(approx) - exact
    if not diff:
        return 0.0
    if not exact:
        raise AbsoluteErrorRequired("exact value is zero; use an absolute error bound")
    q = abs(diff.to_fraction()) / abs(exact.to_fraction())
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


def _to_scaled_ints(M: Sequence[Sequence[DyadicReal]]) -> tuple[np.ndarray, int]:
    rows = [[DyadicReal.coerce(v) for v in row] for row in M]
    exps = [v.exponent for row in rows for v in row if v.significand]
    base = min(exps) if exps else 0
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = v.significand << (v.exponent - base) if v.significand else 0
    return out, base


def o_matmul(A: Sequence[Sequence], B: Sequence[Sequence], max_n: int = 64) -> list[list[DyadicReal]]:
    """Exact product of two dyadic matrices.

    ``max_n`` bounds every dimension; the cost grows as n**3 big-integer
    multiply-adds.
    """
    m, k = len(A), len(A[0]) if len(A) else 0
    k2, n = len(B), len(B[0]) if len(B) else 0
    if k != k2:
        raise ValueError(f"inner dimensions differ: {k} vs {k2}")
    if max(m, k, n) > max_n:
        raise ValueError(f"matrix dimension {max(m, k, n)} exceeds oracle guard {max_n}")
    ai, ea = _to_scaled_ints(A)
    bi, eb = _to_scaled_ints(B)
    ci = ai @ bi if k else np.zeros((m, n), dtype=object)
    return [[DyadicReal(int(ci[i, j]), ea + eb) for j in range(n)] for i in range(m)]


def max_rel_err(approx, exact: Sequence[Sequence[DyadicReal]]) -> float:
    """Worst per-element :func:`o_rel_err` of an ``MPMatrix`` against exact values."""
    rows, cols = approx.shape
    if len(exact) != rows or any(len(r) != cols for r in exact):
        raise ValueError("shape mismatch between approximation and exact matrix")
    worst = 0.0
    for i in range(rows):
        for j in range(cols):
            worst = max(worst, o_rel_err(approx.components(i, j), exact[i][j]))
    return worst


def digit_loss(approx, exact: Sequence[Sequence[DyadicReal]]) -> float:
    """Decimal digits lost relative to the format's capacity.

    ``approx`` is an ``MPMatrix``; the worst per-element relative error ``r``
    gives ``log10(r / eps_fmt)``, floored at zero.
    """
    return loss_digits(max_rel_err(approx, exact), approx.precision)


def loss_digits(worst: float, precision) -> float:
    if worst == 0.0:
        return 0.0
    return max(0.0, math.log10(worst) + precision.decimal_digits)
