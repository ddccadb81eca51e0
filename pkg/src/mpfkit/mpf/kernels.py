"""Scalar multi-component kernels on plain tuples of floats.

These are the single source for both interpreted scalar arithmetic and the
numba-compiled packed and matrix kernels.  Inputs are assumed normalized.
"""
from __future__ import annotations

import math

from .._backend import fma, jitable
from ..eft import (fast_two_sum, merge_by_magnitude, renorm5, three_sum, three_sum2,
                   two_prod, two_sum, vec_sum3, vec_sum4, vec_sum6, vseb4)


@jitable
def lex_less(x, y):
    """Total order on component tuples, used to put operands in canonical order.

    Equal components fall through; ``-0.0`` sorts before ``+0.0``.
    """
    for i in range(len(x)):
        a = x[i]
        b = y[i]
        if a < b:
            return True
        if a > b:
            return False
        if a == 0.0:
            sa = math.copysign(1.0, a) < 0.0
            sb = math.copysign(1.0, b) < 0.0
            if sa != sb:
                return sa
    return False


# -- double-double --------------------------------------------------------------

@jitable
def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    w = x[1] + y[1]
    e = e + w
    return fast_two_sum(s, e)


@jitable
def dd_mul(x, y):
    p1, p2 = two_prod(x[0], y[0])
    w1 = x[0] * y[1]
    w2 = x[1] * y[0]
    w3 = w1 + w2
    p2 = p2 + w3
    return fast_two_sum(p1, p2)


@jitable
def dd_neg(x):
    return -x[0], -x[1]


@jitable
def dd_sub(x, y):
    return dd_add(x, (-y[0], -y[1]))


# -- quad-double (sloppy) ----------------------------------------------------------

@jitable
def qd_add(x, y):
    s0 = x[0] + y[0]
    s1 = x[1] + y[1]
    s2 = x[2] + y[2]
    s3 = x[3] + y[3]
    v0 = s0 - x[0]
    v1 = s1 - x[1]
    v2 = s2 - x[2]
    v3 = s3 - x[3]
    u0 = s0 - v0
    u1 = s1 - v1
    u2 = s2 - v2
    u3 = s3 - v3
    w0 = x[0] - u0
    w1 = x[1] - u1
    w2 = x[2] - u2
    w3 = x[3] - u3
    u0 = y[0] - v0
    u1 = y[1] - v1
    u2 = y[2] - v2
    u3 = y[3] - v3
    t0 = w0 + u0
    t1 = w1 + u1
    t2 = w2 + u2
    t3 = w3 + u3
    s1, t0 = two_sum(s1, t0)
    s2, t0, t1 = three_sum(s2, t0, t1)
    s3, t0 = three_sum2(s3, t0, t2)
    t0 = (t0 + t1) + t3
    return renorm5(s0, s1, s2, s3, t0)


@jitable
def _qd_mul_ordered(x, y):
    p0, q0 = two_prod(x[0], y[0])
    p1, q1 = two_prod(x[0], y[1])
    p2, q2 = two_prod(x[1], y[0])
    p3, q3 = two_prod(x[0], y[2])
    p4, q4 = two_prod(x[1], y[1])
    p5, q5 = two_prod(x[2], y[0])
    p1, p2, q0 = three_sum(p1, p2, q0)
    p2, q1, q2 = three_sum(p2, q1, q2)
    p3, p4, p5 = three_sum(p3, p4, p5)
    s0, t0 = two_sum(p2, p3)
    s1, t1 = two_sum(q1, p4)
    s2 = q2 + p5
    s1, t0 = two_sum(s1, t0)
    s2 = s2 + (t0 + t1)
    s1 = s1 + x[0] * y[3]
    s1 = s1 + x[1] * y[2]
    s1 = s1 + x[2] * y[1]
    s1 = s1 + x[3] * y[0]
    s1 = s1 + q0
    s1 = s1 + q3
    s1 = s1 + q4
    s1 = s1 + q5
    return renorm5(p0, p1, s0, s1, s2)


@jitable
def qd_mul(x, y):
    if lex_less(y, x):
        return _qd_mul_ordered(y, x)
    return _qd_mul_ordered(x, y)


@jitable
def qd_neg(x):
    return -x[0], -x[1], -x[2], -x[3]


@jitable
def qd_sub(x, y):
    return qd_add(x, (-y[0], -y[1], -y[2], -y[3]))


# -- triple-double ------------------------------------------------------------------

@jitable
def _td_add_merge_ordered(x, y):
    z = merge_by_magnitude(x, y)
    e = vec_sum6(z[0], z[1], z[2], z[3], z[4], z[5])
    r = vseb4(3, e)
    return r[0], r[1], r[2]


@jitable
def td_add_merge(x, y):
    if lex_less(y, x):
        return _td_add_merge_ordered(y, x)
    return _td_add_merge_ordered(x, y)


@jitable
def td_add_q(x, y):
    r = qd_add((x[0], x[1], x[2], 0.0), (y[0], y[1], y[2], 0.0))
    return r[0], r[1], r[2]


@jitable
def _td_mul_ordered(x, y):
    z00u, z00l = two_prod(x[0], y[0])
    z01u, z01l = two_prod(x[0], y[1])
    z10u, z10l = two_prod(x[1], y[0])
    b0, b1, b2 = vec_sum3(z00l, z01u, z10u)
    c = fma(x[1], y[1], b2)
    z31 = fma(x[0], y[2], z10l)
    z32 = fma(x[2], y[0], z01l)
    z3 = z31 + z32
    s3 = c + z3
    e0, e1, e2, e3 = vec_sum4(z00u, b0, b1, s3)
    r = vseb4(2, (e1, e2, e3))
    return e0, r[0], r[1]


@jitable
def td_mul(x, y):
    if lex_less(y, x):
        return _td_mul_ordered(y, x)
    return _td_mul_ordered(x, y)


@jitable
def td_mul_q(x, y):
    r = qd_mul((x[0], x[1], x[2], 0.0), (y[0], y[1], y[2], 0.0))
    return r[0], r[1], r[2]


@jitable
def td_neg(x):
    return -x[0], -x[1], -x[2]


@jitable
def td_sub(x, y):
    return td_add_q(x, (-y[0], -y[1], -y[2]))


@jitable
def td_sub_merge(x, y):
    return td_add_merge(x, (-y[0], -y[1], -y[2]))


# -- component loaders over a (width, n) array -------------------------------------

@jitable
def load2(X, i):
    return X[0, i], X[1, i]


@jitable
def load3(X, i):
    return X[0, i], X[1, i], X[2, i]


@jitable
def load4(X, i):
    return X[0, i], X[1, i], X[2, i], X[3, i]


@jitable
def store(X, i, v):
    for k in range(len(v)):
        X[k, i] = v[k]


LOADERS = {2: load2, 3: load3, 4: load4}
