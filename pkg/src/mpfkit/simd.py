"""Four-lane binary64 packs and lane-parallel error-free transformations.

A ``LaneQuad`` is a float64 array of four lanes.  Every ``simd_*`` routine
works on any equal-length 1-D arrays, so the same code also drives whole
matrix rows; lane ``i`` of every result is bit-identical to the scalar
routine in :mod:`mpfkit.eft` applied to lane ``i`` of the inputs.

Two implementations sit behind each routine: numba loops over the shared
scalar kernels (the compiled path) and straight numpy expressions with
masked selects for the branching kernels (the portable path).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from . import eft
from ._backend import HAVE_NUMBA, njit, portable

LANES = 4
ALIGN_BYTES = 32

__all__ = [
    "LANES", "lane_quad", "lq_add", "lq_sub", "lq_mul", "lq_fma", "lq_load_aligned",
    "lq_store_aligned", "simd_two_sum", "simd_quick_two_sum", "simd_two_prod",
    "simd_two_prod_dekker", "simd_three_sum", "simd_three_sum2", "simd_vec_sum",
    "simd_vseb", "simd_merge_by_magnitude", "simd_renorm5",
]


def lane_quad(*values: float) -> np.ndarray:
    if len(values) == 1:
        values = tuple(values[0])
    arr = np.array(values, dtype=np.float64)
    if arr.shape != (LANES,):
        raise ValueError(f"a LaneQuad holds exactly {LANES} lanes, got shape {arr.shape}")
    return arr


def _f64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


# -- portable numpy kernels ----------------------------------------------------
# Straight transcriptions of eft.*, vectorised across lanes.

def np_two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def np_fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def np_split(a):
    t = eft._SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def np_two_prod(a, b):
    p = a * b
    ah, al = np_split(a)
    bh, bl = np_split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def np_fma(a, b, c):
    a, b, c = _f64(a), _f64(b), _f64(c)
    p, pl = np_two_prod(a, b)
    th, tl = np_two_sum(c, p)
    v, ve = np_two_sum(tl, pl)
    v = _f64(v)
    even = (v.view(np.int64) & 1) == 0
    v = np.where((ve != 0.0) & even, np.nextafter(v, np.copysign(np.inf, ve)), v)
    return th + v


def np_three_sum(a, b, c):
    t1, t2 = np_two_sum(a, b)
    s, t3 = np_two_sum(c, t1)
    e1, e2 = np_two_sum(t2, t3)
    return s, e1, e2


def np_three_sum2(a, b, c):
    t1, t2 = np_two_sum(a, b)
    s, t3 = np_two_sum(c, t1)
    return s, t2 + t3


def np_vec_sum(x: Sequence[np.ndarray]) -> list[np.ndarray]:
    n = len(x)
    out = [None] * n
    s = x[n - 1]
    for i in range(n - 2, -1, -1):
        s, out[i + 1] = np_two_sum(x[i], s)
    out[0] = s
    return out


def np_vseb(k: int, e: Sequence[np.ndarray]) -> list[np.ndarray]:
    e = np.broadcast_arrays(*[_f64(v) for v in e])
    shape = e[0].shape
    cols = [v.ravel() for v in e]
    lanes = np.arange(cols[0].size)
    r = np.zeros((k, lanes.size))
    j = np.zeros(lanes.size, dtype=np.intp)
    live = np.ones(lanes.size, dtype=bool)
    eps = cols[0].copy()
    for i in range(len(cols) - 1):
        rv, nxt = np_fast_two_sum(eps, cols[i + 1])
        r[j[live], lanes[live]] = rv[live]
        nz = nxt != 0.0
        stop = live & nz & (j >= k - 1)
        j += live & nz & ~stop
        eps = np.where(nz, nxt, rv)
        live &= ~stop
    fin = live & (eps != 0.0) & (j <= k - 1)
    r[j[fin], lanes[fin]] = eps[fin]
    return [row.reshape(shape) for row in r]


def np_merge_by_magnitude(x: Sequence[np.ndarray], y: Sequence[np.ndarray]) -> list[np.ndarray]:
    xs = np.stack(np.broadcast_arrays(*[_f64(v) for v in (*x, *y)]))
    shape = xs.shape[1:]
    xs = xs.reshape(6, -1)
    X, Y = xs[:3], xs[3:]
    lanes = np.arange(X.shape[1])
    i = np.zeros(lanes.size, dtype=np.intp)
    j = np.zeros(lanes.size, dtype=np.intp)
    out = []
    for _ in range(6):
        xi = X[np.minimum(i, 2), lanes]
        yj = Y[np.minimum(j, 2), lanes]
        take_x = (j >= 3) | ((i < 3) & (np.abs(xi) >= np.abs(yj)))
        out.append(np.where(take_x, xi, yj).reshape(shape))
        i += take_x
        j += ~take_x
    return out


def np_renorm5(c0, c1, c2, c3, c4) -> list[np.ndarray]:
    s, c4 = np_fast_two_sum(c3, c4)
    s, c3 = np_fast_two_sum(c2, s)
    s, c2 = np_fast_two_sum(c1, s)
    c0, c1 = np_fast_two_sum(c0, s)
    c0, c1, c2, c3, c4 = np.broadcast_arrays(c0, c1, c2, c3, c4)
    shape = c0.shape
    tail = [c.ravel() for c in (c1, c2, c3, c4)]
    n = tail[0].size
    lanes = np.arange(n)
    slots = np.zeros((4, n))
    slots[0] = c0.ravel()
    j = np.zeros(n, dtype=np.intp)
    for c in tail:
        full = j == 3
        acc = slots[j, lanes]
        hi, r = np_fast_two_sum(acc, c)
        slots[j, lanes] = np.where(full, acc + c, hi)
        adv = ~full & (r != 0.0)
        j += adv
        slots[j[adv], lanes[adv]] = r[adv]
    return [row.reshape(shape) for row in slots]


# -- compiled lane loops ---------------------------------------------------------

def _lift2(fn):
    @njit(nogil=True)
    def loop(a, b, out):
        for i in range(a.shape[0]):
            r = fn(a[i], b[i])
            for k in range(len(r)):
                out[k, i] = r[k]
    return loop


def _lift3(fn):
    @njit(nogil=True)
    def loop(a, b, c, out):
        for i in range(a.shape[0]):
            r = fn(a[i], b[i], c[i])
            for k in range(len(r)):
                out[k, i] = r[k]
    return loop


if HAVE_NUMBA:
    _nb_two_sum = _lift2(eft.two_sum)
    _nb_fast_two_sum = _lift2(eft.fast_two_sum)
    _nb_two_prod = _lift2(eft.two_prod)
    _nb_two_prod_dekker = _lift2(eft.two_prod_dekker)
    _nb_three_sum = _lift3(eft.three_sum)
    _nb_three_sum2 = _lift3(eft.three_sum2)

    @njit(nogil=True)
    def _nb_arith(op, a, b, out):
        for i in range(a.shape[0]):
            if op == 0:
                out[i] = a[i] + b[i]
            elif op == 1:
                out[i] = a[i] - b[i]
            else:
                out[i] = a[i] * b[i]

    @njit(nogil=True)
    def _nb_fma(a, b, c, out):
        for i in range(a.shape[0]):
            out[i] = eft.fma(a[i], b[i], c[i])

    @njit(nogil=True)
    def _nb_vec_sum(X, out):
        n = X.shape[0]
        for lane in range(X.shape[1]):
            s = X[n - 1, lane]
            for i in range(n - 2, -1, -1):
                s, e = eft.two_sum(X[i, lane], s)
                out[i + 1, lane] = e
            out[0, lane] = s

    @njit(nogil=True)
    def _nb_vseb(k, E, out):
        n = E.shape[0]
        for lane in range(E.shape[1]):
            j = 0
            eps = E[0, lane]
            done = False
            for i in range(n - 1):
                r, eps = eft.fast_two_sum(eps, E[i + 1, lane])
                out[j, lane] = r
                if eps != 0.0:
                    if j >= k - 1:
                        done = True
                        break
                    j += 1
                else:
                    eps = r
            if not done and eps != 0.0 and j <= k - 1:
                out[j, lane] = eps

    @njit(nogil=True)
    def _nb_merge(X, out):
        for lane in range(X.shape[1]):
            z = eft.merge_by_magnitude((X[0, lane], X[1, lane], X[2, lane]),
                                       (X[3, lane], X[4, lane], X[5, lane]))
            for k in range(6):
                out[k, lane] = z[k]

    @njit(nogil=True)
    def _nb_renorm5(X, out):
        for lane in range(X.shape[1]):
            r = eft.renorm5(X[0, lane], X[1, lane], X[2, lane], X[3, lane], X[4, lane])
            for k in range(4):
                out[k, lane] = r[k]


def _flat(*arrays):
    arrs = np.broadcast_arrays(*[_f64(a) for a in arrays])
    return arrs[0].shape, [np.ascontiguousarray(a).ravel() for a in arrs]


def _run(kernel, nout, *arrays):
    shape, flat = _flat(*arrays)
    out = np.empty((nout, flat[0].size))
    kernel(*flat, out)
    return tuple(o.reshape(shape) for o in out)


def _run_stacked(kernel, nout, arrays, *lead):
    shape, flat = _flat(*arrays)
    X = np.stack(flat)
    out = np.zeros((nout, X.shape[1]))
    kernel(*lead, X, out)
    return [o.reshape(shape) for o in out]


# -- public lane operations -------------------------------------------------------

def _arith(code, a, b):
    if portable():
        a, b = _f64(a), _f64(b)
        return (np.add, np.subtract, np.multiply)[code](a, b)
    shape, (fa, fb) = _flat(a, b)
    out = np.empty(fa.size)
    _nb_arith(code, fa, fb, out)
    return out.reshape(shape)


def lq_add(a, b) -> np.ndarray:
    return _arith(0, a, b)


def lq_sub(a, b) -> np.ndarray:
    return _arith(1, a, b)


def lq_mul(a, b) -> np.ndarray:
    return _arith(2, a, b)


def lq_fma(a, b, c) -> np.ndarray:
    """Lanewise ``a*b + c`` rounded once."""
    if portable():
        return np_fma(a, b, c)
    shape, (fa, fb, fc) = _flat(a, b, c)
    out = np.empty(fa.size)
    _nb_fma(fa, fb, fc, out)
    return out.reshape(shape)


def lq_load_aligned(plane: np.ndarray, offset: int) -> np.ndarray:
    """Copy four consecutive values starting at ``offset`` out of ``plane``."""
    flat = plane.reshape(-1)
    if __debug__:
        if offset % LANES:
            raise ValueError(f"offset {offset} is not a multiple of {LANES}")
        if offset + LANES > flat.size:
            raise ValueError("load runs past the end of the plane")
    return flat[offset:offset + LANES].copy()


def lq_store_aligned(plane: np.ndarray, offset: int, v: np.ndarray) -> None:
    flat = plane.reshape(-1)
    if not np.shares_memory(flat, plane):
        raise ValueError("plane must be contiguous for in-place stores")
    if __debug__:
        if offset % LANES:
            raise ValueError(f"offset {offset} is not a multiple of {LANES}")
        if offset + LANES > flat.size:
            raise ValueError("store runs past the end of the plane")
    flat[offset:offset + LANES] = v


def simd_two_sum(a, b):
    if portable():
        return np_two_sum(_f64(a), _f64(b))
    return _run(_nb_two_sum, 2, a, b)


def simd_quick_two_sum(a, b):
    if portable():
        return np_fast_two_sum(_f64(a), _f64(b))
    return _run(_nb_fast_two_sum, 2, a, b)


def simd_two_prod(a, b):
    """Lanewise exact product; FMA-based when compiled, Dekker-split when portable."""
    if portable():
        return np_two_prod(_f64(a), _f64(b))
    return _run(_nb_two_prod, 2, a, b)


def simd_two_prod_dekker(a, b):
    if portable():
        return np_two_prod(_f64(a), _f64(b))
    return _run(_nb_two_prod_dekker, 2, a, b)


def simd_three_sum(a, b, c):
    if portable():
        return np_three_sum(_f64(a), _f64(b), _f64(c))
    return _run(_nb_three_sum, 3, a, b, c)


def simd_three_sum2(a, b, c):
    if portable():
        return np_three_sum2(_f64(a), _f64(b), _f64(c))
    return _run(_nb_three_sum2, 2, a, b, c)


def simd_vec_sum(x: Sequence) -> list[np.ndarray]:
    if len(x) < 2:
        raise ValueError("vec_sum needs at least two terms")
    if portable():
        return np_vec_sum(np.broadcast_arrays(*[_f64(v) for v in x]))
    return _run_stacked(_nb_vec_sum, len(x), x)


def simd_vseb(k: int, e: Sequence) -> list[np.ndarray]:
    if k < 1 or len(e) < k:
        raise ValueError(f"vseb needs 1 <= k <= len(e), got k={k}, len(e)={len(e)}")
    if portable():
        return np_vseb(k, e)
    return _run_stacked(_nb_vseb, k, e, k)


def simd_merge_by_magnitude(x: Sequence, y: Sequence) -> list[np.ndarray]:
    if len(x) != 3 or len(y) != 3:
        raise ValueError("merge_by_magnitude takes two triples")
    if portable():
        return np_merge_by_magnitude(x, y)
    return _run_stacked(_nb_merge, 6, (*x, *y))


def simd_renorm5(c0, c1, c2, c3, c4) -> list[np.ndarray]:
    if portable():
        return np_renorm5(*[_f64(c) for c in (c0, c1, c2, c3, c4)])
    return _run_stacked(_nb_renorm5, 4, (c0, c1, c2, c3, c4))
