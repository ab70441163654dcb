from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qudit_surface.complex import build_square_disk, build_torus_square, build_wheel_disk
from qudit_surface.errors import ProtocolError
from qudit_surface.frames import Vacuum
from qudit_surface.gfarith import FieldCtx
from qudit_surface.homology import cycle_representative
from qudit_surface.pauli import PauliOp
from qudit_surface.protocols import (
    annihilate,
    braid_phase,
    charge_string,
    class_state,
    create_dyon_pair,
    dyon_energy_check,
    dyon_mass,
    flux_string,
    fuse,
    interferometer,
    interferometer_csv,
    interferometer_formulas,
    interferometer_layout,
    logical_x,
    move_dyon,
    retrieve,
    storage_face_order,
    store,
    store_retrieve,
    syndrome,
    torus_winding_phase,
)
from qudit_surface.stabilizer import StabilizerCode
from qudit_surface.statevec import DenseState, outcome_probabilities


def disk(d, rows=2, cols=3):
    return StabilizerCode(build_square_disk(rows, cols, FieldCtx(d)))


def wheel(d):
    return StabilizerCode(build_wheel_disk(3, FieldCtx(d)))


def torus(d):
    return StabilizerCode(build_torus_square(2, FieldCtx(d)))


# -- strings and dyons --------------------------------------------------------


def test_charge_and_flux_strings_move_labels():
    code = disk(5)
    ch, fl = syndrome(code, charge_string(code.complex, "v0", "v11", 2))
    assert ch == {"v0": 3, "v11": 2} and fl == {}
    ch, fl = syndrome(code, flux_string(code.complex, "f0,0", "f2,1", 4))
    assert ch == {} and fl == {"f0,0": 1, "f2,1": 4}


@pytest.mark.parametrize("d", [2, 3, 5])
def test_pair_creation_syndrome_and_labels(d):
    code = disk(d)
    for a, b in itertools.product(range(d), repeat=2):
        cfg = create_dyon_pair(code, "h1,1", a, b)
        assert cfg.consistent()
        assert cfg.total_labels() == (0, 0)
        if (a, b) == (0, 0):
            assert cfg.particles == [] and cfg.op.is_identity()


def test_created_dyon_location():
    code = disk(3)
    cfg = create_dyon_pair(code, "h1,1", 1, 2)
    p, q = cfg.particles
    e = code.complex.edge_by_id["h1,1"]
    assert (p.a, p.b, p.v) == (1, 2, e.head) and (q.a, q.b, q.v) == (2, 1, e.tail)
    ch, fl = syndrome(code, cfg.op)
    assert ch[e.head] == 1 and fl[p.f] == 2


def test_pair_energy_d3_charge():
    code = disk(2, 1, 2)
    rep = dyon_energy_check(StabilizerCode(build_square_disk(1, 2, FieldCtx(3))), "h0,1", 1, 0)
    assert abs(rep["excess"] - 6.0) < 1e-9 and abs(rep["expected"] - 6.0) < 1e-12


def test_dyon_mass_formula():
    assert abs(dyon_mass(3, 1.0, 1.0, 1, 0) - 3.0) < 1e-12
    assert abs(dyon_mass(2, 0.5, 2.0, 1, 1) - (2.0 + 8.0)) < 1e-12
    assert dyon_mass(5, 1.0, 1.0, 0, 0) == 0


@pytest.mark.parametrize("d", [2, 3])
def test_move_keeps_consistency_and_retraced_annihilation_is_exact(d):
    code = disk(d)
    vac = Vacuum(code)
    for a, b in itertools.product(range(d), repeat=2):
        if (a, b) == (0, 0):
            continue
        cfg = create_dyon_pair(code, "h1,1", a, b)
        p = cfg.particles[0]
        v0, f0 = p.v, p.f
        move_dyon(cfg, 0, "v11" if a else None, "f2,1" if b else None)
        assert cfg.consistent()
        move_dyon(cfg, 0, v0, f0)
        annihilate(cfg, 0, 1)
        assert cfg.particles == []
        assert abs(vac.expectation(cfg.op) - 1) < 1e-12


def test_fusion_adds_charges():
    code = disk(5)
    cfg = create_dyon_pair(code, "h0,0", 2, 0)
    create_dyon_pair(code, "h2,0", 4, 0, cfg)
    # bring the second charge onto the first
    move_dyon(cfg, 2, cfg.particles[0].v, None)
    fuse(cfg, 0, 2)
    assert cfg.particles[-1].a == (2 + 4) % 5
    assert cfg.consistent()


def test_fusion_requires_shared_location():
    code = disk(3)
    cfg = create_dyon_pair(code, "h1,1", 1, 0)
    with pytest.raises(ProtocolError):
        fuse(cfg, 0, 1)


# -- braiding -----------------------------------------------------------------


def test_charge_around_flux_d2():
    res = braid_phase(wheel(2), "R2", 1, 0, 0, 1)
    assert res.symbolic == res.numeric == 1


def test_wind_around_nothing():
    res = braid_phase(wheel(3), "none", 1, 2)
    assert res.symbolic == res.numeric == 0


def test_d5_example():
    res = braid_phase(wheel(5), "R2", 2, 1, 1, 3)
    assert res.symbolic == res.numeric == res.expected == 2


@pytest.mark.parametrize("d", [2, 3])
def test_exhaustive_mutual_statistics(d):
    code = wheel(d)
    for a, b, a2, b2 in itertools.product(range(d), repeat=4):
        res = braid_phase(code, "R2", a, b, a2, b2)
        assert res.symbolic == res.numeric == (a2 * b + b2 * a) % d


@pytest.mark.parametrize("d", [2, 3, 5])
def test_spin_exchange_and_conjugation(d):
    code = wheel(d)
    for r, s in itertools.product(range(d), repeat=2):
        for proc in ("T", "R"):
            res = braid_phase(code, proc, r, s)
            assert res.symbolic == res.numeric == (r * s) % d
        c = braid_phase(code, "C", r, s, 1, 1, numeric=False)
        assert c.labels["conjugated"]["a"] == (-r) % d
        assert c.symbolic == (r + s) % d  # conjugating both labels leaves a'b + b'a unchanged


def test_braid_is_path_independent():
    code = wheel(5)
    small = braid_phase(code, "R2", 1, 2, 3, 1)
    # a larger charge loop enclosing one more (empty) triangle
    big = braid_phase(code, "R2", 1, 2, 3, 1, region=("t0", "t2"))
    assert small.symbolic == big.symbolic == small.numeric


@settings(max_examples=25, deadline=None)
@given(st.tuples(*[st.integers(0, 4)] * 6))
def test_mutual_statistics_bilinear(labels):
    code = wheel(5)
    a, b, c, e, a2, b2 = labels
    f = lambda x, y: braid_phase(code, "R2", x, y, a2, b2, numeric=False).symbolic  # noqa: E731
    assert f((a + c) % 5, (b + e) % 5) == (f(a, b) + f(c, e)) % 5


def test_open_loop_rejected():
    from qudit_surface.protocols import BraidSetup, _check_closed

    code = wheel(3)
    with pytest.raises(ProtocolError, match="closed"):
        _check_closed(code, BraidSetup(code).create("moving", 1, 0))


def test_braid_requires_wheel():
    with pytest.raises(ProtocolError):
        braid_phase(disk(2), "R2", 1, 0, 0, 1)


def test_torus_winding_global_phase():
    rep = torus_winding_phase(torus(3))
    assert rep["symbolic"] == rep["numeric"]


# -- storage and retrieval ----------------------------------------------------


def random_alphas(d, rng):
    a = rng.normal(size=d) + 1j * rng.normal(size=d)
    return a / np.linalg.norm(a)


def test_store_trivial_amplitudes_give_vacuum_class():
    code = torus(3)
    omega = cycle_representative(code.complex, (1, 0))
    st_, tr = store(code, [1, 0, 0], omega, seed=0)
    assert abs(abs(np.vdot(class_state(code, omega, 0), st_.amps)) - 1) < 1e-9


def test_store_d2_plus_state():
    code = torus(2)
    omega = cycle_representative(code.complex, (0, 1))
    st_, tr = store(code, np.array([1, 1]) / np.sqrt(2), omega, seed=3)
    assert tr.fidelities["projection_oracle"] > 1 - 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_store_lands_in_code_space_with_equal_phases(seed):
    code = torus(3)
    omega = cycle_representative(code.complex, (1, 0))
    st_, tr = store(code, random_alphas(3, np.random.default_rng(seed)), omega, seed=seed)
    for _, g in code.generators:
        assert outcome_probabilities(st_, g)[0] > 1 - 1e-9
    assert tr.fidelities["class_sum"] > 1 - 1e-9


def test_face_order_respects_rules():
    code = torus(3)
    omega = cycle_representative(code.complex, (1, 0))
    plan = storage_face_order(code, omega.vec)
    g = code.complex
    assert len(plan) == len(g.faces) - 1
    used = set()
    for f, e in plan:
        assert g.edges[e].id not in omega.support()
        assert e not in used
        used |= {g.edge_index[x] for x, _ in g.face_by_id[f].boundary}


def test_face_order_obstruction_reported():
    code = torus(3)
    omega = cycle_representative(code.complex, (1, 0))
    with pytest.raises(ProtocolError, match="no edge outside"):
        storage_face_order(code, omega.vec, order=["f0", "f3", "f1"])


def test_logical_x_shifts_class():
    code = torus(3)
    omega = cycle_representative(code.complex, (1, 0))
    x = logical_x(code, omega)
    s0 = DenseState(code.ctx, code.n, class_state(code, omega, 0))
    from qudit_surface.statevec import apply_pauli

    out = apply_pauli(s0, x)
    assert abs(abs(np.vdot(class_state(code, omega, 1), out.amps)) - 1) < 1e-9


def test_round_trip_fidelity():
    code = torus(3)
    omega = cycle_representative(code.complex, (1, 0))
    rng = np.random.default_rng(11)
    for seed in range(3):
        rep = store_retrieve(code, random_alphas(3, rng), omega, seed=seed)
        assert rep["retrieve_fidelity"] > 1 - 1e-9
        assert rep["retrieve"].fidelities["code_register_class0"] > 1 - 1e-9


def test_retrieve_basis_state_exactly():
    code = torus(3)
    omega = cycle_representative(code.complex, (1, 0))
    rep = store_retrieve(code, [1, 0, 0], omega)
    rho = rep["retrieve"].notes["ancilla_populations"]
    assert abs(rho[0] - 1) < 1e-12


def test_retrieve_rejects_state_outside_code():
    code = torus(2)
    omega = cycle_representative(code.complex, (1, 0))
    with pytest.raises(ProtocolError, match="outside the code space"):
        retrieve(code, DenseState.basis(code.ctx, code.n, [1] + [0] * (code.n - 1)), omega)


def test_store_rejects_boundary_cycle():
    code = torus(3)
    with pytest.raises(ProtocolError):
        store(code, [1, 0, 0], np.zeros(code.n, dtype=int))


# -- interferometer -----------------------------------------------------------


def test_layout_validation():
    code = disk(3)
    lay = interferometer_layout(code.complex)
    assert lay.edge == "h1,1"
    with pytest.raises(ProtocolError):
        interferometer_layout(StabilizerCode(build_square_disk(1, 2, FieldCtx(3))).complex)


def test_probe_must_be_nonzero():
    with pytest.raises(ProtocolError):
        interferometer(disk(3), (0, 0), (1, 0))


@pytest.mark.parametrize("d,probe,target,chi", [
    (2, (0, 1), (1, 0), 0.0),
    (2, (1, 1), (1, 0), 0.4),
    (3, (1, 0), (0, 1), 0.0),
    (3, (2, 1), (1, 2), 1.0),
    (5, (2, 3), (4, 1), -0.7),
])
def test_exact_mode_matches_formulas(d, probe, target, chi):
    rep = interferometer(disk(d), probe, target, chi)
    f = rep["formulas"]
    for k, v in rep["exact"].items():
        assert abs(v - f[k]) < 1e-10
    assert abs(np.exp(1j * rep["phi_top_ratio"]) - np.exp(1j * f["phi_top"])) < 1e-9


def test_d2_worked_example_values():
    # the delta factor is 1 for every d = 2 probe, so both branches add
    rep = interferometer(disk(2), (0, 1), (1, 0), 0.0)
    assert abs(rep["exact"]["sigma_x_tau"] + 1.0) < 1e-12
    assert abs(rep["exact"]["sigma_x_triv"] - 1.0) < 1e-12
    assert abs(rep["exact"]["sigma_y_tau"]) < 1e-12


def test_dense_engine_agrees_d2():
    code = disk(2)
    a = interferometer(code, (1, 1), (1, 1), 0.7, engine="dense")
    b = interferometer(code, (1, 1), (1, 1), 0.7, engine="frame")
    for k in a["exact"]:
        assert abs(a["exact"][k] - b["exact"][k]) < 1e-10


def test_trivial_target():
    rep = interferometer(disk(3), (1, 2), (0, 0), 0.3)
    assert rep["formulas"]["phi_top"] == 0
    assert abs(rep["exact"]["sigma_x_tau"] - rep["exact"]["sigma_x_triv"]) < 1e-12
    assert abs(rep["exact"]["sigma_y_tau"] - rep["exact"]["sigma_y_triv"]) < 1e-12


def test_d3_prediction_has_no_delta_term():
    f = interferometer_formulas(3, 1, 0, 0, 1)
    assert f["delta"] == 0 and abs(f["phi_top"] - 2 * np.pi / 3) < 1e-12


def test_sampling_within_five_sigma_and_csv():
    rep = interferometer(disk(3), (1, 0), (0, 1), 0.2, exact=False, shots=10_000, seed=4, csv_rows=True)
    for k, v in rep["estimate"].items():
        assert abs(v - rep["exact"][k]) < 5 * rep["stderr"][k]
    text = interferometer_csv(rep)
    assert text.startswith("ordering,shot,basis,m,outcome\n")
    assert len(text.strip().splitlines()) == 1 + 4 * 10_000


def test_transcripts_are_deterministic():
    code = torus(3)
    omega = cycle_representative(code.complex, (1, 0))
    a = store(code, [0.6, 0.8, 0], omega, seed=9)[1].dumps()
    b = store(code, [0.6, 0.8, 0], omega, seed=9)[1].dumps()
    assert a == b
    r1 = interferometer(disk(3), (1, 0), (0, 1), exact=False, shots=200, seed=1)["transcript"].dumps()
    r2 = interferometer(disk(3), (1, 0), (0, 1), exact=False, shots=200, seed=1)["transcript"].dumps()
    assert r1 == r2
