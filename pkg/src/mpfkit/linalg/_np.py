"""Portable (pure numpy) matrix kernels mirroring ``_nb``.

Variant 0 walks elements one at a time through the scalar kernels, variant 1
gathers elements into four-lane packs with fancy indexing, variant 2 works on
plane slices in place.  Per-element operation order matches ``_nb`` exactly.
"""
from __future__ import annotations

import numpy as np

from ..mpf import kernels as K
from ..mpf import vector as V

LANES = 4


def ew(op_name: str, X: np.ndarray, Y: np.ndarray, out: np.ndarray, cols: int, variant: int) -> None:
    width, rows, stride = X.shape
    if variant == 0:
        op = getattr(K, op_name)
        for r in range(rows):
            xr = X[:, r, :cols].T.tolist()
            yr = Y[:, r, :cols].T.tolist()
            for c in range(cols):
                out[:, r, c] = op(tuple(xr[c]), tuple(yr[c]))
        return
    op = getattr(V, op_name)
    if variant == 1:
        rr, cc = np.divmod(np.arange(rows * cols), cols) if cols else (np.array([], int),) * 2
        pad = (-rr.size) % LANES
        rr = np.concatenate([rr, np.zeros(pad, int)]).reshape(-1, LANES)
        cc = np.concatenate([cc, np.full(pad, -1)]).reshape(-1, LANES)
        live = cc >= 0
        ccs = np.where(live, cc, 0)
        xs = tuple(np.where(live, X[k][rr, ccs], 0.0) for k in range(width))
        ys = tuple(np.where(live, Y[k][rr, ccs], 0.0) for k in range(width))
        res = op(xs, ys)
        for k in range(width):
            out[k][rr[live], cc[live]] = res[k][live]
        return
    xs = tuple(X[k].reshape(-1, LANES) for k in range(width))
    ys = tuple(Y[k].reshape(-1, LANES) for k in range(width))
    res = op(xs, ys)
    for k in range(width):
        out[k].reshape(-1, LANES)[...] = res[k]


def mm(add_name: str, mul_name: str, A: np.ndarray, B: np.ndarray, C: np.ndarray,
       n: int, kdim: int, tiles: np.ndarray, bi: int, bj: int, bk: int, variant: int) -> None:
    width, m_rows, _ = C.shape
    if variant == 0:
        add, mul = getattr(K, add_name), getattr(K, mul_name)
    else:
        add, mul = getattr(V, add_name), getattr(V, mul_name)
    for i0, j0 in tiles:
        i1, j1 = min(i0 + bi, m_rows), min(j0 + bj, n)
        for k0 in range(0, kdim, bk):
            k1 = min(k0 + bk, kdim)
            if variant == 0:
                _mm_scalar(add, mul, A, B, C, i0, i1, j0, j1, k0, k1)
                continue
            ci = tuple(C[q, i0:i1, j0:j1] for q in range(width))
            acc = ci
            for k in range(k0, k1):
                if variant == 1:
                    rows_i = np.arange(i0, i1)
                    cols_j = np.arange(j0, j1)
                    a = tuple(np.take(A[q][:, k], rows_i)[:, None] for q in range(width))
                    b = tuple(np.take(B[q][k], cols_j)[None, :] for q in range(width))
                else:
                    a = tuple(A[q, i0:i1, k:k + 1] for q in range(width))
                    b = tuple(B[q, k:k + 1, j0:j1] for q in range(width))
                acc = add(acc, mul(a, b))
            for q in range(width):
                C[q, i0:i1, j0:j1] = acc[q]


def _mm_scalar(add, mul, A, B, C, i0, i1, j0, j1, k0, k1):
    width = C.shape[0]
    for i in range(i0, i1):
        crow = [tuple(v) for v in C[:, i, j0:j1].T.tolist()]
        for k in range(k0, k1):
            a = tuple(A[:, i, k].tolist())
            brow = B[:, k, j0:j1].T.tolist()
            for jj in range(j1 - j0):
                crow[jj] = add(crow[jj], mul(a, tuple(brow[jj])))
        for jj in range(j1 - j0):
            for q in range(width):
                C[q, i, j0 + jj] = crow[jj][q]
