"""Portable packed kernels: the multi-component algorithms on tuples of numpy
arrays, one lane per array element."""
from __future__ import annotations

import numpy as np

from ..simd import (np_fast_two_sum as fast_two_sum, np_fma as fma, np_merge_by_magnitude,
                    np_renorm5, np_three_sum as three_sum, np_three_sum2 as three_sum2,
                    np_two_prod as two_prod, np_two_sum as two_sum, np_vec_sum, np_vseb)


def lex_less(x, y):
    less = np.zeros(np.broadcast(x[0], y[0]).shape, dtype=bool)
    undecided = np.ones_like(less)
    for a, b in zip(x, y):
        sa, sb = np.signbit(a), np.signbit(b)
        lt = (a < b) | ((a == 0.0) & (b == 0.0) & sa & ~sb)
        gt = (a > b) | ((a == 0.0) & (b == 0.0) & ~sa & sb)
        less |= undecided & lt
        undecided &= ~(lt | gt)
    return less


def _canonical(x, y):
    swap = lex_less(y, x)
    if not swap.any():
        return x, y
    xs = tuple(np.where(swap, b, a) for a, b in zip(x, y))
    ys = tuple(np.where(swap, a, b) for a, b in zip(x, y))
    return xs, ys


def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    w = x[1] + y[1]
    e = e + w
    return fast_two_sum(s, e)


def dd_mul(x, y):
    p1, p2 = two_prod(x[0], y[0])
    w3 = x[0] * y[1] + x[1] * y[0]
    p2 = p2 + w3
    return fast_two_sum(p1, p2)


def qd_add(x, y):
    s = [x[i] + y[i] for i in range(4)]
    v = [s[i] - x[i] for i in range(4)]
    u = [s[i] - v[i] for i in range(4)]
    w = [x[i] - u[i] for i in range(4)]
    u = [y[i] - v[i] for i in range(4)]
    t0, t1, t2, t3 = (w[i] + u[i] for i in range(4))
    s0 = s[0]
    s1, t0 = two_sum(s[1], t0)
    s2, t0, t1 = three_sum(s[2], t0, t1)
    s3, t0 = three_sum2(s[3], t0, t2)
    t0 = (t0 + t1) + t3
    return tuple(np_renorm5(s0, s1, s2, s3, t0))


def qd_mul(x, y):
    x, y = _canonical(x, y)
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
    return tuple(np_renorm5(p0, p1, s0, s1, s2))


def td_add_merge(x, y):
    x, y = _canonical(x, y)
    z = np_merge_by_magnitude(x, y)
    e = np_vec_sum(z)
    return tuple(np_vseb(3, e))


def td_add_q(x, y):
    zero = np.zeros_like(x[0])
    return qd_add((*x, zero), (*y, zero))[:3]


def td_mul(x, y):
    x, y = _canonical(x, y)
    z00u, z00l = two_prod(x[0], y[0])
    z01u, z01l = two_prod(x[0], y[1])
    z10u, z10l = two_prod(x[1], y[0])
    b0, b1, b2 = np_vec_sum([z00l, z01u, z10u])
    c = fma(x[1], y[1], b2)
    z31 = fma(x[0], y[2], z10l)
    z32 = fma(x[2], y[0], z01l)
    s3 = c + (z31 + z32)
    e0, e1, e2, e3 = np_vec_sum([z00u, b0, b1, s3])
    r1, r2 = np_vseb(2, [e1, e2, e3])
    return e0, r1, r2


def td_mul_q(x, y):
    zero = np.zeros_like(x[0])
    return qd_mul((*x, zero), (*y, zero))[:3]


def neg(x):
    return tuple(-c for c in x)


def dd_sub(x, y):
    return dd_add(x, neg(y))


def td_sub(x, y):
    return td_add_q(x, neg(y))


def td_sub_merge(x, y):
    return td_add_merge(x, neg(y))


def qd_sub(x, y):
    return qd_add(x, neg(y))
