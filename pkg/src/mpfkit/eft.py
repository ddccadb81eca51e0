"""Scalar error-free transformations on binary64.

Every function here is plain Python over floats and is also callable from
numba-compiled kernels (``register_jitable``), so the interpreted and compiled
paths share one source.  Exactness holds for finite inputs whose results do
not overflow; ``two_prod`` additionally needs ``|a*b| >= 2**-969``.
"""
from __future__ import annotations

from typing import Sequence

from ._backend import _SPLITTER, fma, jitable

__all__ = [
    "fma", "two_sum", "quick_two_sum", "fast_two_sum", "two_prod", "two_prod_dekker",
    "split", "three_sum", "three_sum2", "vec_sum", "vseb", "merge_by_magnitude", "renorm5",
]


@jitable
def two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


@jitable
def fast_two_sum(a, b):
    """Dekker's three-operation sum; exact when ``|a| >= |b|`` or ``a == 0``."""
    s = a + b
    e = b - (s - a)
    return s, e


def quick_two_sum(a: float, b: float) -> tuple[float, float]:
    assert a == 0.0 or abs(a) >= abs(b), "quick_two_sum needs |a| >= |b|"
    return fast_two_sum(a, b)


@jitable
def split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


@jitable
def two_prod_dekker(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@jitable
def two_prod(a, b):
    p = a * b
    return p, fma(a, b, -p)


@jitable
def three_sum(a, b, c):
    t1, t2 = two_sum(a, b)
    s, t3 = two_sum(c, t1)
    e1, e2 = two_sum(t2, t3)
    return s, e1, e2


@jitable
def three_sum2(a, b, c):
    t1, t2 = two_sum(a, b)
    s, t3 = two_sum(c, t1)
    return s, t2 + t3


# -- fixed-arity distillation used inside the multi-component kernels --------

@jitable
def vec_sum3(a, b, c):
    s, e2 = two_sum(b, c)
    s, e1 = two_sum(a, s)
    return s, e1, e2


@jitable
def vec_sum4(a, b, c, d):
    s, e3 = two_sum(c, d)
    s, e2 = two_sum(b, s)
    s, e1 = two_sum(a, s)
    return s, e1, e2, e3


@jitable
def vec_sum6(a, b, c, d, e, f):
    s, e5 = two_sum(e, f)
    s, e4 = two_sum(d, s)
    s, e3 = two_sum(c, s)
    s, e2 = two_sum(b, s)
    s, e1 = two_sum(a, s)
    return s, e1, e2, e3, e4, e5


@jitable
def vseb4(k, e):
    """VecSumErrBranch over the tuple ``e`` keeping at most ``k <= 4`` terms.

    Always returns four slots; slots at index ``>= k`` are zero.
    """
    r0 = 0.0
    r1 = 0.0
    r2 = 0.0
    r3 = 0.0
    j = 0
    eps = e[0]
    for i in range(len(e) - 1):
        r, eps = fast_two_sum(eps, e[i + 1])
        if j == 0:
            r0 = r
        elif j == 1:
            r1 = r
        elif j == 2:
            r2 = r
        else:
            r3 = r
        if eps != 0.0:
            if j >= k - 1:
                return r0, r1, r2, r3
            j += 1
        else:
            eps = r
    if eps != 0.0 and j <= k - 1:
        if j == 0:
            r0 = eps
        elif j == 1:
            r1 = eps
        elif j == 2:
            r2 = eps
        else:
            r3 = eps
    return r0, r1, r2, r3


@jitable
def _pick(x, y, i, j):
    if j >= 3 or (i < 3 and abs(x[i]) >= abs(y[j])):
        return x[i], i + 1, j
    return y[j], i, j + 1


@jitable
def merge_by_magnitude(x, y):
    """Merge two magnitude-sorted triples; ``x`` wins ties."""
    i = 0
    j = 0
    z0, i, j = _pick(x, y, i, j)
    z1, i, j = _pick(x, y, i, j)
    z2, i, j = _pick(x, y, i, j)
    z3, i, j = _pick(x, y, i, j)
    z4, i, j = _pick(x, y, i, j)
    z5, i, j = _pick(x, y, i, j)
    return z0, z1, z2, z3, z4, z5


@jitable
def renorm5(c0, c1, c2, c3, c4):
    s, c4 = fast_two_sum(c3, c4)
    s, c3 = fast_two_sum(c2, s)
    s, c2 = fast_two_sum(c1, s)
    c0, c1 = fast_two_sum(c0, s)

    tail = (c1, c2, c3, c4)
    s0 = c0
    s1 = 0.0
    s2 = 0.0
    s3 = 0.0
    j = 0
    for i in range(4):
        c = tail[i]
        if j == 3:
            s3 = s3 + c
            continue
        if j == 0:
            acc, r = fast_two_sum(s0, c)
            s0 = acc
        elif j == 1:
            acc, r = fast_two_sum(s1, c)
            s1 = acc
        else:
            acc, r = fast_two_sum(s2, c)
            s2 = acc
        if r != 0.0:
            j += 1
            if j == 1:
                s1 = r
            elif j == 2:
                s2 = r
            else:
                s3 = r
    return s0, s1, s2, s3


# -- variable-length forms ----------------------------------------------------

def vec_sum(x: Sequence[float]) -> tuple[float, ...]:
    """Distil ``x`` with a chain of two_sum from the last element to the first.

    The exact sum is preserved and the leading component comes first.
    """
    n = len(x)
    if n < 2:
        raise ValueError("vec_sum needs at least two terms")
    out = [0.0] * n
    s = float(x[n - 1])
    for i in range(n - 2, -1, -1):
        s, out[i + 1] = two_sum(float(x[i]), s)
    out[0] = s
    return tuple(out)


def vseb(k: int, e: Sequence[float]) -> tuple[float, ...]:
    """Compress ``e`` to ``k`` components, advancing only on nonzero residuals."""
    if k < 1 or len(e) < k:
        raise ValueError(f"vseb needs 1 <= k <= len(e), got k={k}, len(e)={len(e)}")
    r = [0.0] * k
    j = 0
    eps = float(e[0])
    for i in range(len(e) - 1):
        r[j], eps = fast_two_sum(eps, float(e[i + 1]))
        if eps != 0.0:
            if j >= k - 1:
                return tuple(r)
            j += 1
        else:
            eps = r[j]
    if eps != 0.0 and j <= k - 1:
        r[j] = eps
    return tuple(r)
