"""numba kernels over flattened component planes ``(width, rows * stride)``.

Variant codes: 0 = element at a time, 1 = gather four elements into a lane
scratch buffer and scatter back, 2 = contiguous four-lane chunks straight out
of the planes.  All three evaluate identical expressions per element.
"""
from __future__ import annotations

import numpy as np

from .._backend import njit
from ..mpf import kernels as K

LANES = 4
_CACHE: dict = {}


def ew_kernel(op_name: str, width: int):
    key = ("ew", op_name)
    if key not in _CACHE:
        _CACHE[key] = _make_ew(getattr(K, op_name), width)
    return _CACHE[key]


def mm_kernel(add_name: str, mul_name: str, width: int):
    key = ("mm", add_name, mul_name)
    if key not in _CACHE:
        _CACHE[key] = _make_mm(getattr(K, add_name), getattr(K, mul_name), width)
    return _CACHE[key]


def _make_ew(op, width):
    ld = K.LOADERS[width]
    st = K.store

    @njit(nogil=True)
    def ew(X, Y, out, rows, cols, stride, variant):
        if variant == 0:
            for r in range(rows):
                for c in range(cols):
                    i = r * stride + c
                    st(out, i, op(ld(X, i), ld(Y, i)))
        elif variant == 1:
            xs = np.zeros((width, LANES))
            ys = np.zeros((width, LANES))
            os = np.zeros((width, LANES))
            for r in range(rows):
                for c0 in range(0, cols, LANES):
                    for lane in range(LANES):
                        c = c0 + lane
                        for k in range(width):
                            xs[k, lane] = X[k, r * stride + c] if c < cols else 0.0
                            ys[k, lane] = Y[k, r * stride + c] if c < cols else 0.0
                    for lane in range(LANES):
                        st(os, lane, op(ld(xs, lane), ld(ys, lane)))
                    for lane in range(LANES):
                        c = c0 + lane
                        if c < cols:
                            for k in range(width):
                                out[k, r * stride + c] = os[k, lane]
        else:
            for base in range(0, rows * stride, LANES):
                for lane in range(LANES):
                    i = base + lane
                    st(out, i, op(ld(X, i), ld(Y, i)))

    return ew


def _make_mm(add, mul, width):
    ld = K.LOADERS[width]
    st = K.store

    @njit(nogil=True)
    def mm(A, B, C, n, kdim, sa, sb, sc, tiles, bi, bj, bk, variant):
        """C[i, j] <- C[i, j] + A[i, k] * B[k, j] for k ascending, over the given
        ``(i0, j0)`` output tiles of ``bi x bj`` with inner blocks of ``bk``."""
        m_rows = C.shape[1] // sc
        xs = np.zeros((width, LANES))
        cs = np.zeros((width, LANES))
        for t in range(tiles.shape[0]):
            i0 = tiles[t, 0]
            j0 = tiles[t, 1]
            i1 = min(i0 + bi, m_rows)
            j1 = min(j0 + bj, n)
            for k0 in range(0, kdim, bk):
                k1 = min(k0 + bk, kdim)
                for i in range(i0, i1):
                    for k in range(k0, k1):
                        a = ld(A, i * sa + k)
                        brow = k * sb
                        crow = i * sc
                        if variant == 0:
                            for j in range(j0, j1):
                                st(C, crow + j, add(ld(C, crow + j), mul(a, ld(B, brow + j))))
                        elif variant == 1:
                            for jj in range(j0, j1, LANES):
                                for lane in range(LANES):
                                    j = jj + lane
                                    for q in range(width):
                                        xs[q, lane] = B[q, brow + j] if j < j1 else 0.0
                                        cs[q, lane] = C[q, crow + j] if j < j1 else 0.0
                                for lane in range(LANES):
                                    st(cs, lane, add(ld(cs, lane), mul(a, ld(xs, lane))))
                                for lane in range(LANES):
                                    j = jj + lane
                                    if j < j1:
                                        for q in range(width):
                                            C[q, crow + j] = cs[q, lane]
                        else:
                            jend = sc if j1 == n else j1
                            j = j0
                            while j < jend and j % LANES:
                                st(C, crow + j, add(ld(C, crow + j), mul(a, ld(B, brow + j))))
                                j += 1
                            while j + LANES <= jend:
                                for lane in range(LANES):
                                    idx = j + lane
                                    st(C, crow + idx, add(ld(C, crow + idx), mul(a, ld(B, brow + idx))))
                                j += LANES
                            while j < jend:
                                st(C, crow + j, add(ld(C, crow + j), mul(a, ld(B, brow + j))))
                                j += 1

    return mm
