from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qudit_surface.complex import (
    BUILDERS,
    Chain,
    Edge,
    Face,
    TwoComplex,
    boundary,
    build_cube_sphere,
    build_hexagon_pair,
    build_honeycomb_torus,
    build_punctured_disk,
    build_square_disk,
    build_torus_square,
    build_wheel_disk,
    dual,
)
from qudit_surface.errors import ComplexError, ParseError
from qudit_surface.gfarith import FieldCtx

F2, F3 = FieldCtx(2), FieldCtx(3)


def all_builders(ctx):
    return [
        build_torus_square(1, ctx),
        build_torus_square(2, ctx),
        build_torus_square(3, ctx),
        build_square_disk(2, 3, ctx),
        build_square_disk(3, 3, ctx, holes=[(1, 1)]),
        build_wheel_disk(4, ctx),
        build_cube_sphere(ctx),
        build_honeycomb_torus(1, 1, ctx),
        build_honeycomb_torus(2, 2, ctx),
        build_hexagon_pair(ctx),
        build_punctured_disk(1, ctx),
        build_punctured_disk(2, ctx),
        build_punctured_disk(2, ctx, sides=2),
    ]


@pytest.mark.parametrize("d", [2, 3, 5])
def test_boundary_squared_vanishes(d):
    for g in all_builders(FieldCtx(d)):
        g.validate()
        assert not ((np.asarray(g.boundary1) @ np.asarray(g.boundary2_all)) % d).any(), g


def test_edge_boundary_is_tail_minus_head():
    g = build_torus_square(2, F3)
    c = boundary(Chain.from_dict(g, 1, {"h0": 1}))
    e = g.edge_by_id["h0"]
    assert {k: int(v) for k, v in c.coeffs.items()} == {e.tail: 1, e.head: 2}


def test_zero_chain_boundary():
    g = build_torus_square(2, F3)
    assert boundary(Chain.zero(g, 1)).is_zero()


def test_sum_of_faces_on_torus_has_no_boundary():
    g = build_torus_square(2, F3)
    c = Chain.from_dict(g, 2, {f.id: 1 for f in g.faces})
    assert boundary(c).is_zero()


def test_boundary_below_grade_zero():
    g = build_torus_square(2, F3)
    with pytest.raises(ValueError, match="no boundary below grade 0"):
        boundary(Chain.zero(g, 0))


@pytest.mark.parametrize("m,counts", [(1, (1, 2, 1)), (2, (4, 8, 4)), (3, (9, 18, 9))])
def test_torus_counts(m, counts):
    g = build_torus_square(m, F2)
    assert (len(g.vertices), g.n, len(g.faces)) == counts
    assert g.euler_characteristic == 0


def test_single_cell_torus_has_self_loops():
    g = build_torus_square(1, F3)
    assert not np.asarray(g.boundary1).any()


@pytest.mark.parametrize("rows,cols", [(1, 1), (2, 2), (3, 2), (2, 3)])
def test_honeycomb_is_trivalent_with_hexagons(rows, cols):
    g = build_honeycomb_torus(rows, cols, F2)
    g.validate()
    valence = {v: 0 for v in g.vertices}
    for e in g.edges:
        valence[e.tail] += 1
        valence[e.head] += 1
    assert set(valence.values()) == {3}
    assert all(len(f.boundary) == 6 for f in g.faces)
    assert 2 * g.n == 3 * len(g.vertices)
    assert g.euler_characteristic == 0


def test_cube_sphere_euler_characteristic():
    g = build_cube_sphere(F2)
    assert (len(g.vertices), g.n, len(g.faces)) == (8, 12, 6)
    assert g.euler_characteristic == 2


def test_hexagon_pair_vertex_star():
    g = build_hexagon_pair(F3)
    star = {e.id for e in g.edges if "v0" in (e.tail, e.head)}
    assert star == {"[v6,v0]", "[v5,v0]", "[v0,v1]"}


def test_punctured_disk_structure():
    g = build_punctured_disk(2, F2)
    assert g.mode == "bounded" and len(g.punctures) == 2
    # the outer boundary is a single closed loop
    outer = g.outer_boundary
    verts = set()
    for eid, _ in outer:
        e = g.edge_by_id[eid]
        verts |= {e.tail, e.head}
    assert len(verts) == len(outer)
    # puncture faces are counted, so the filled-in disk has characteristic 1
    assert g.euler_characteristic == 1


def test_dual_of_torus_preserves_counts_and_is_involutive():
    for g in [build_torus_square(2, F3), build_honeycomb_torus(2, 2, F3), build_cube_sphere(F3)]:
        h = dual(g)
        h.validate()
        assert (len(h.vertices), h.n, len(h.faces)) == (len(g.faces), g.n, len(g.vertices))
        back = dual(h)
        assert back.vertices == g.vertices and back.edges == g.edges
        # face boundaries come back as the same signed edge sets (cyclic order may differ)
        assert {f.id: sorted(f.boundary) for f in back.faces} == {f.id: sorted(f.boundary) for f in g.faces}


def test_dual_of_honeycomb_is_triangular():
    h = dual(build_honeycomb_torus(2, 2, F2))
    assert all(len(f.boundary) == 3 for f in h.faces)


def test_dual_rejects_bounded():
    with pytest.raises(ComplexError):
        dual(build_square_disk(1, 1, F2))


def test_json_roundtrip_all_builders():
    for g in all_builders(F3):
        text = g.dumps()
        assert TwoComplex.loads(text).dumps() == text


def test_parse_errors_name_the_field():
    g = build_square_disk(1, 1, F2)
    obj = g.to_json()
    del obj["edges"][0]["from"]
    with pytest.raises(ParseError) as exc:
        TwoComplex.from_json(obj)
    assert exc.value.where == "edges[0]"
    with pytest.raises(ParseError) as exc:
        TwoComplex.loads("{\n  \"vertices\": [")
    assert "line" in exc.value.where


def test_invalid_closed_complex_detected():
    g = TwoComplex(("a", "b"), (Edge("e", "a", "b"),), (Face("f", (("e", 1),)),), F2, "closed")
    assert not g.is_valid()
    with pytest.raises(ComplexError):
        g.validate()


def test_builders_registry():
    assert set(BUILDERS) == {"torus", "honeycomb", "sphere-cube", "punctured-disk", "square-disk", "wheel"}
    for name, make in BUILDERS.items():
        make(F2).validate()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.sampled_from([2, 3, 5]), st.data())
def test_boundary_is_linear(rows, cols, d, data):
    g = build_square_disk(rows, cols, FieldCtx(d))
    coeffs = st.lists(st.integers(0, d - 1), min_size=g.n, max_size=g.n)
    a = Chain(g, 1, np.array(data.draw(coeffs)))
    b = Chain(g, 1, np.array(data.draw(coeffs)))
    assert boundary(a + b) == boundary(a) + boundary(b)
    assert boundary(a.scale(2)) == boundary(a).scale(2)
