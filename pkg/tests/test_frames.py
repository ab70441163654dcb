from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qudit_surface.complex import build_square_disk, build_torus_square, build_wheel_disk
from qudit_surface.errors import ProtocolError
from qudit_surface.frames import DenseLattice, PauliSumState, Vacuum, conditional_unitary
from qudit_surface.gfarith import FieldCtx
from qudit_surface.pauli import PauliOp
from qudit_surface.stabilizer import StabilizerCode


@pytest.fixture(scope="module", params=[2, 3])
def disk(request):
    d = request.param
    code = StabilizerCode(build_wheel_disk(3, FieldCtx(d)))
    return code, DenseLattice.ground(code), PauliSumState.ground(code)


def random_pauli(ctx, n, rng):
    return PauliOp(ctx, int(rng.integers(ctx.d)), rng.integers(0, ctx.d, n), rng.integers(0, ctx.d, n))


def test_degenerate_vacuum_rejected():
    code = StabilizerCode(build_torus_square(2, FieldCtx(2)))
    with pytest.raises(ProtocolError):
        Vacuum(code)
    with pytest.raises(ProtocolError):
        DenseLattice.ground(code)


def test_vacuum_expectation_matches_dense(disk):
    code, dense, _ = disk
    vac = Vacuum(code)
    rng = np.random.default_rng(5)
    ops = [random_pauli(code.ctx, code.n, rng) for _ in range(40)]
    # stabilizer products with a phase have nonzero expectation; add a few
    ops += [code.generator_ops[0] * code.generator_ops[-1], code.generator_ops[1].scale_phase(1)]
    for p in ops:
        want = dense.inner(dense.apply(p))
        assert abs(vac.expectation(p) - want) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_engines_agree_on_sums_and_projections(seed):
    code = StabilizerCode(build_wheel_disk(3, FieldCtx(3)))
    rng = np.random.default_rng(seed)
    dense, frame = DenseLattice.ground(code), PauliSumState.ground(code)
    ops = [random_pauli(code.ctx, code.n, rng) for _ in range(3)]
    coefs = rng.normal(size=3) + 1j * rng.normal(size=3)
    sd = dense.apply(ops[0]).scale(coefs[0])
    sf = frame.apply(ops[0]).scale(coefs[0])
    for p, c in zip(ops[1:], coefs[1:]):
        sd = sd.add(dense.apply(p).scale(c))
        sf = sf.add(frame.apply(p).scale(c))
    assert abs(sd.norm() - sf.norm()) < 1e-9
    cond = [(code.generator_ops[0], int(rng.integers(3)))]
    assert abs(sd.project(cond).norm() - sf.project(cond).norm()) < 1e-9
    q = random_pauli(code.ctx, code.n, rng)
    assert abs(sd.inner(sd.apply(q)) - sf.inner(sf.apply(q))) < 1e-9
    assert abs(sf.simplify().norm() - sf.norm()) < 1e-9


def test_conditional_unitary_is_norm_preserving():
    code = StabilizerCode(build_square_disk(1, 2, FieldCtx(3)))
    frame = PauliSumState.ground(code)
    vg, fg = code.vertex_gens, code.face_gens
    e = code.complex.edge_index["h0,0"]
    s = frame.apply(PauliOp.single(code.ctx, code.n, e, a=1))
    hop = PauliOp.single(code.ctx, code.n, code.complex.edge_index["h1,0"], a=1)
    head = code.complex.edges[e].head
    nxt = code.complex.edges[code.complex.edge_index["h1,0"]].head
    on_b = [(vg[head], 1), (vg[nxt], 0)]
    on_a = [(vg[head], 0), (vg[nxt], 1)]
    mixed = s.add(frame).scale(1 / np.sqrt(2))
    out = conditional_unitary(mixed, hop, on_b, on_a, np.exp(0.3j))
    assert abs(out.norm() - 1) < 1e-12
    moved = out.project([(vg[nxt], 1)])
    assert abs(moved.norm() ** 2 - 0.5) < 1e-12
