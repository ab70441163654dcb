from __future__ import annotations

import warnings

import pytest

from qudit_surface.gfarith import FieldCtx

# fields exercised throughout: primes and the small extensions
PRIME_DS = (2, 3, 5)
EXT_FIELDS = ((2, 2), (2, 3), (3, 2))


@pytest.fixture(autouse=True)
def _quiet_generator_warnings():
    # builders that produce identity generators (e.g. d=2 loops) warn; tests check values instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def poly_mulmod(a, b, modulus, d):
    """Schoolbook product of coefficient lists (low degree first) reduced by a monic modulus."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % d
    ell = len(modulus) - 1
    for k in range(len(out) - 1, ell - 1, -1):
        c = out[k]
        if c:
            for j in range(ell + 1):
                out[k - ell + j] = (out[k - ell + j] - c * modulus[j]) % d
    return (out + [0] * ell)[:ell]


def field(d: int, ell: int = 1) -> FieldCtx:
    return FieldCtx(d, ell)


def rank_mod_p(m, p: int) -> int:
    """Plain Gaussian elimination over F_p, kept separate from the library's linear algebra."""
    rows = [[int(x) % p for x in row] for row in m]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def betti1(g, p: int) -> int:
    """dim H1 = |E| - rank d1 - rank d2, from integer incidence matrices."""
    import numpy as np

    d1 = np.asarray(g.boundary1) % p
    d2 = np.asarray(g.boundary2) % p
    r1 = rank_mod_p(d1, p) if d1.size else 0
    r2 = rank_mod_p(d2, p) if d2.size else 0
    return g.n - r1 - r2


def dense_pauli(p):
    """Explicit matrix of a Pauli tensor from single-qudit X(a), Z(b) matrices.

    Register 0 is the least significant digit, so the Kronecker product runs
    from the last register to the first.
    """
    import numpy as np

    ctx = p.ctx
    q, d = ctx.q, ctx.d
    w = np.exp(2j * np.pi / d)
    mat = np.array([[1.0 + 0j]])
    for e in reversed(range(p.n)):
        x = np.zeros((q, q), dtype=complex)
        z = np.zeros((q, q), dtype=complex)
        for k in range(q):
            x[ctx.add_table[k, p.x[e]], k] = 1
            z[k, k] = w ** ctx.trace_table[ctx.mul_table[p.z[e], k]]
        mat = np.kron(mat, x @ z)
    return w**p.phase * mat
