from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qudit_surface.errors import InconsistentStabilizerError, NonCommutingError, PauliError
from qudit_surface.gfarith import FieldCtx
from qudit_surface.pauli import (
    PauliOp,
    check_commuting,
    commutation_phase,
    inverse,
    multiply,
    power,
    product,
    render,
    symplectic_rank,
)

from conftest import dense_pauli

FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)]


def pauli_strategy(ctx, n):
    vec = st.lists(st.integers(0, ctx.q - 1), min_size=n, max_size=n)
    return st.builds(lambda c, x, z: PauliOp(ctx, c, np.array(x), np.array(z)),
                     st.integers(0, ctx.d - 1), vec, vec)


def test_z_times_x_reordering_d3():
    ctx = FieldCtx(3)
    z = PauliOp.single(ctx, 1, 0, b=1)
    x = PauliOp.single(ctx, 1, 0, a=1)
    p = multiply(z, x)
    assert p.phase == 1 and list(p.x) == [1] and list(p.z) == [1]


def test_gf4_reordering_uses_trace():
    ctx = FieldCtx(2, 2)
    alpha = int(ctx.alpha)
    z = PauliOp.single(ctx, 1, 0, b=ctx.alpha)
    x = PauliOp.single(ctx, 1, 0, a=ctx.alpha)
    p = multiply(z, x)
    assert p.phase == ctx.trace_table[ctx.mul_table[alpha, alpha]]
    assert list(p.x) == [alpha] and list(p.z) == [alpha]


def test_identity_is_neutral():
    ctx = FieldCtx(3)
    p = PauliOp(ctx, 2, np.array([1, 2]), np.array([0, 1]))
    one = PauliOp.identity(ctx, 2)
    assert multiply(one, p) == p and multiply(p, one) == p


def test_xx_commutes_with_z_zinv():
    ctx = FieldCtx(3)
    p = PauliOp.from_dicts(ctx, 2, x={0: 1, 1: 1})
    q = PauliOp.from_dicts(ctx, 2, z={0: 1, 1: -1})
    assert commutation_phase(p, q) == 0


def test_single_edge_x_then_z_d5():
    ctx = FieldCtx(5)
    x = PauliOp.single(ctx, 1, 0, a=1)
    z = PauliOp.single(ctx, 1, 0, b=1)
    assert commutation_phase(x, z) == 4
    assert commutation_phase(z, x) == 1


@pytest.mark.parametrize("d,ell", FIELDS)
def test_products_match_dense_matrices_exhaustively_n1(d, ell):
    ctx = FieldCtx(d, ell)
    ops = [PauliOp(ctx, 0, np.array([a]), np.array([b])) for a in range(ctx.q) for b in range(ctx.q)]
    for p, q in itertools.product(ops, repeat=2):
        assert np.allclose(dense_pauli(multiply(p, q)), dense_pauli(p) @ dense_pauli(q))
        t = commutation_phase(p, q)
        w = np.exp(2j * np.pi * t / d)
        assert np.allclose(dense_pauli(p) @ dense_pauli(q), w * dense_pauli(q) @ dense_pauli(p))


@pytest.mark.parametrize("d", [2, 3])
def test_group_order_n2(d):
    # closure of single-edge X, Z and the scalar w has order d * d^2 * d^2
    ctx = FieldCtx(d)
    gens = [PauliOp.single(ctx, 2, e, a=1) for e in range(2)] + [PauliOp.single(ctx, 2, e, b=1) for e in range(2)]
    gens.append(PauliOp(ctx, 1, np.zeros(2), np.zeros(2)))
    seen = {PauliOp.identity(ctx, 2)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                r = multiply(p, g)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    assert len(seen) == d * d**2 * d**2


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_algebra_properties(field_spec, data):
    ctx = FieldCtx(*field_spec)
    n = 3
    p, q, r = (data.draw(pauli_strategy(ctx, n)) for _ in range(3))
    assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))
    assert (commutation_phase(p, q) + commutation_phase(q, p)) % ctx.d == 0
    assert multiply(p, inverse(p)).is_identity()
    assert multiply(p, q) == multiply(q, p).scale_phase(commutation_phase(p, q))
    assert power(p, ctx.d).is_scalar()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(2, 1), (3, 1), (2, 2)]), st.data())
def test_dense_oracle_n2(field_spec, data):
    ctx = FieldCtx(*field_spec)
    p, q = (data.draw(pauli_strategy(ctx, 2)) for _ in range(2))
    assert np.allclose(dense_pauli(multiply(p, q)), dense_pauli(p) @ dense_pauli(q))
    assert np.allclose(dense_pauli(p.dagger()), dense_pauli(p).conj().T)


def test_mismatched_operands():
    with pytest.raises(PauliError):
        multiply(PauliOp.identity(FieldCtx(3), 2), PauliOp.identity(FieldCtx(3), 3))
    with pytest.raises(PauliError):
        multiply(PauliOp.identity(FieldCtx(3), 2), PauliOp.identity(FieldCtx(5), 2))


def test_render():
    ctx = FieldCtx(3)
    p = PauliOp.from_dicts(ctx, 6, x={2: 1, 5: 1}, z={2: 2}, phase=2)
    assert render(p) == "w^2 X2(1) Z2(2) X5(1)"
    assert render(PauliOp.identity(ctx, 2)) == "I"


def test_symplectic_rank_empty():
    ctx = FieldCtx(3)
    s = symplectic_rank([], ctx, 4)
    assert s.rank == 0 and s.code_dim == 3**4


def test_noncommuting_pair_is_named():
    ctx = FieldCtx(3)
    x = PauliOp.single(ctx, 1, 0, a=1)
    z = PauliOp.single(ctx, 1, 0, b=1)
    with pytest.raises(NonCommutingError, match="gx and gz"):
        check_commuting([x, z], ["gx", "gz"])


def test_inconsistent_stabilizer():
    ctx = FieldCtx(3)
    x = PauliOp.single(ctx, 1, 0, a=1)
    with pytest.raises(InconsistentStabilizerError, match="inconsistent stabilizer"):
        symplectic_rank([x, x.scale_phase(1)])


def test_product_helper():
    ctx = FieldCtx(2)
    ops = [PauliOp.single(ctx, 2, 0, a=1), PauliOp.single(ctx, 2, 1, b=1)]
    assert product(ops) == multiply(*ops)
    assert product([], ctx, 2).is_identity()
