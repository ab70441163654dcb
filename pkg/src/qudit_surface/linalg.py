"""Gaussian elimination over a finite field.

Matrices are integer arrays of field-element indices (see ``gfarith``).
Pivoting takes the first nonzero entry in row order, so every routine is
deterministic.
"""

from __future__ import annotations

import numpy as np

from .gfarith import FieldCtx


def rref(m, ctx: FieldCtx) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = np.array(m, dtype=np.int64, copy=True)
    if a.ndim != 2:
        a = a.reshape(len(a), -1)
    add, mul, neg, inv = ctx.add_table, ctx.mul_table, ctx.neg_table, ctx.inv_table
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = mul[inv[a[r, c]], a[r]]
        others = np.nonzero(a[:, c])[0]
        for o in others:
            if o != r:
                a[o] = add[a[o], neg[mul[a[o, c], a[r]]]]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m, ctx: FieldCtx) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, ctx)[1])


def nullspace(m, ctx: FieldCtx) -> np.ndarray:
    """Basis (as rows) of {x : m @ x = 0}, one vector per free column."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r, piv = rref(m, ctx)
    free = [c for c in range(cols) if c not in piv]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, p in enumerate(piv):
            basis[k, p] = ctx.neg_table[r[i, f]]
    return basis


def matvec(m, x, ctx: FieldCtx) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros(m.shape[0], dtype=np.int64)
    for j in range(m.shape[1]):
        out = ctx.add_table[out, ctx.mul_table[m[:, j], x[j]]]
    return out


def solve(m, b, ctx: FieldCtx) -> np.ndarray | None:
    """One solution of m @ x = b, or None when the system is inconsistent."""
    m = np.asarray(m, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    rows, cols = m.shape
    aug = np.concatenate([m, b.reshape(rows, 1)], axis=1)
    r, piv = rref(aug, ctx)
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, p in enumerate(piv):
        x[p] = r[i, cols]
    return x


def in_row_space(rows_rref: np.ndarray, pivots: list[int], v, ctx: FieldCtx):
    """Reduce v against an RREF basis; returns (residual, coefficients)."""
    v = np.array(v, dtype=np.int64, copy=True)
    coef = np.zeros(len(pivots), dtype=np.int64)
    for i, p in enumerate(pivots):
        c = v[p]
        if c:
            coef[i] = c
            v = ctx.add_table[v, ctx.neg_table[ctx.mul_table[c, rows_rref[i]]]]
    return v, coef
