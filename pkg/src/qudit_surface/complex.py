"""Oriented two-complexes, chains and boundary maps.

Conventions
-----------
* An edge ``[u, v]`` runs from ``u`` (tail) to ``v`` (head) and has
  boundary ``u - v``.
* A face stores its boundary as an ordered sequence of ``(edge_id, sign)``
  pairs with ``sign`` in ``{+1, -1}``; chain-level maths only uses the
  multiset.
* In ``bounded`` mode, faces listed in ``punctures`` are holes: they are
  kept for bookkeeping (their boundaries are the puncture loops) but are
  excluded from the active face set used by homology and stabilizers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import ComplexError, ParseError
from .gfarith import FieldCtx, FieldElement


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Face:
    id: str
    boundary: tuple[tuple[str, int], ...]


@dataclass(frozen=True, eq=False)
class TwoComplex:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    faces: tuple[Face, ...]
    ctx: FieldCtx
    mode: str = "closed"
    punctures: tuple[str, ...] = ()
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(
            self,
            "faces",
            tuple(Face(f.id, tuple((e, int(s)) for e, s in f.boundary)) for f in self.faces),
        )
        object.__setattr__(self, "punctures", tuple(self.punctures))
        if self.mode not in ("closed", "bounded"):
            raise ComplexError(f"unknown mode {self.mode!r}")
        self._check_references()

    # -- indexing -----------------------------------------------------------

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def face_index(self) -> dict[str, int]:
        return {f.id: i for i, f in enumerate(self.faces)}

    @cached_property
    def edge_by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def face_by_id(self) -> dict[str, Face]:
        return {f.id: f for f in self.faces}

    @property
    def n(self) -> int:
        return len(self.edges)

    @cached_property
    def active_faces(self) -> tuple[Face, ...]:
        """Faces carrying stabilizers: every face except the punctures."""
        holes = set(self.punctures)
        return tuple(f for f in self.faces if f.id not in holes)

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def _check_references(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ComplexError("duplicate vertex id")
        if len(self.edge_index) != len(self.edges):
            raise ComplexError("duplicate edge id")
        if len(self.face_index) != len(self.faces):
            raise ComplexError("duplicate face id")
        vs = set(self.vertices)
        for e in self.edges:
            if e.tail not in vs or e.head not in vs:
                raise ComplexError(f"edge {e.id} has an undeclared endpoint")
        for f in self.faces:
            for eid, s in f.boundary:
                if eid not in self.edge_index:
                    raise ComplexError(f"face {f.id} uses undeclared edge {eid}")
                if s not in (1, -1):
                    raise ComplexError(f"face {f.id}: sign {s} not in {{+1,-1}}")
        for p in self.punctures:
            if p not in self.face_index:
                raise ComplexError(f"puncture {p} is not a face")
        if self.punctures and self.mode != "bounded":
            raise ComplexError("punctures require bounded mode")

    # -- boundary matrices (entries are field indices) ----------------------

    def _signed(self, s: int) -> int:
        return self.ctx.from_int(s)

    @cached_property
    def boundary1(self) -> np.ndarray:
        """|V| x |E| matrix of the edge boundary map."""
        m = np.zeros((len(self.vertices), self.n), dtype=np.int64)
        d = self.ctx.d
        for j, e in enumerate(self.edges):
            t, h = self.vertex_index[e.tail], self.vertex_index[e.head]
            m[t, j] = (m[t, j] + 1) % d
            m[h, j] = (m[h, j] - 1) % d
        return m

    def _face_columns(self, faces: Iterable[Face]) -> np.ndarray:
        faces = list(faces)
        m = np.zeros((self.n, len(faces)), dtype=np.int64)
        d = self.ctx.d
        for j, f in enumerate(faces):
            for eid, s in f.boundary:
                i = self.edge_index[eid]
                m[i, j] = (m[i, j] + s) % d
        return m

    @cached_property
    def boundary2(self) -> np.ndarray:
        """|E| x |F'| matrix of the face boundary map over active faces."""
        return self._face_columns(self.active_faces)

    @cached_property
    def boundary2_all(self) -> np.ndarray:
        return self._face_columns(self.faces)

    def face_signs(self, face: Face | str) -> dict[str, int]:
        """Net orientation coefficient (mod d, as +1/-1/0 integer) of each edge in a face."""
        f = self.face_by_id[face] if isinstance(face, str) else face
        out: dict[str, int] = {}
        for eid, s in f.boundary:
            out[eid] = out.get(eid, 0) + s
        return {e: s for e, s in out.items() if s % self.ctx.d}

    def edge_faces(self, eid: str) -> list[tuple[str, int]]:
        """Occurrences of an edge in face boundaries (all faces)."""
        return [(f.id, s) for f in self.faces for e, s in f.boundary if e == eid]

    @cached_property
    def outer_boundary(self) -> tuple[tuple[str, int], ...]:
        """Signed edges of the outer boundary: edges used by exactly one face."""
        counts: dict[str, list[int]] = {}
        for f in self.faces:
            for e, s in f.boundary:
                counts.setdefault(e, []).append(s)
        return tuple((e.id, counts[e.id][0]) for e in self.edges if len(counts.get(e.id, [])) == 1)

    def puncture_boundary(self, pid: str) -> tuple[tuple[str, int], ...]:
        """Puncture loop with the orientation induced by the surface (opposite to the hole face)."""
        return tuple((e, -s) for e, s in self.face_by_id[pid].boundary)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        """Run every structural invariant; raises ComplexError on failure."""
        prod = np.zeros((len(self.vertices), len(self.faces)), dtype=np.int64)
        b1, b2 = self.boundary1, self.boundary2_all
        for k in range(self.n):
            prod = (prod + np.outer(b1[:, k], b2[k, :])) % self.ctx.d
        if prod.any():
            bad = [self.faces[j].id for j in np.nonzero(prod.any(axis=0))[0]]
            raise ComplexError(f"boundary of boundary is nonzero on faces {bad}")
        occ: dict[str, list[int]] = {e.id: [] for e in self.edges}
        for f in self.faces:
            for e, s in f.boundary:
                occ[e].append(s)
        for e, signs in occ.items():
            if self.mode == "closed":
                if len(signs) != 2 or sum(signs) != 0:
                    raise ComplexError(
                        f"closed mode: edge {e} must appear twice with opposite signs, got {signs}"
                    )
            elif len(signs) > 2 or (len(signs) == 2 and sum(signs) != 0):
                raise ComplexError(f"bounded mode: edge {e} has face occurrences {signs}")

    def is_valid(self) -> bool:
        try:
            self.validate()
        except ComplexError:
            return False
        return True

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "field": self.ctx.to_json(),
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "from": e.tail, "to": e.head} for e in self.edges],
            "faces": [{"id": f.id, "boundary": [[e, s] for e, s in f.boundary]} for f in self.faces],
            "punctures": list(self.punctures),
            "mode": self.mode,
        }
        if self.meta:
            out["meta"] = dict(self.meta)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: Mapping, ctx: FieldCtx | None = None) -> "TwoComplex":
        def need(key, container=obj, where=""):
            if key not in container:
                raise ParseError(f"missing key {key!r}", where or key)
            return container[key]

        try:
            if ctx is None:
                ctx = FieldCtx.from_json(need("field"))
            vertices = [str(v) for v in need("vertices")]
            edges = []
            for i, e in enumerate(need("edges")):
                where = f"edges[{i}]"
                edges.append(Edge(str(need("id", e, where)), str(need("from", e, where)), str(need("to", e, where))))
            faces = []
            for i, f in enumerate(need("faces")):
                where = f"faces[{i}]"
                bnd = need("boundary", f, where)
                try:
                    pairs = tuple((str(e), int(s)) for e, s in bnd)
                except (TypeError, ValueError) as exc:
                    raise ParseError("boundary entries must be [edge_id, sign]", where) from exc
                faces.append(Face(str(need("id", f, where)), pairs))
            mode = obj.get("mode", "closed")
            punctures = [str(p) for p in obj.get("punctures", [])]
        except ParseError:
            raise
        except (TypeError, AttributeError, ValueError) as exc:
            raise ParseError(str(exc)) from exc
        return cls(tuple(vertices), tuple(edges), tuple(faces), ctx, mode, tuple(punctures), obj.get("meta", {}))

    @classmethod
    def loads(cls, text: str) -> "TwoComplex":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
        if not isinstance(obj, dict):
            raise ParseError("top level must be an object")
        # accept the envelope written by the CLI ("complex build --out")
        if "complex" in obj and "vertices" not in obj:
            obj = obj["complex"]
            if not isinstance(obj, dict):
                raise ParseError("'complex' must be an object", "complex")
        return cls.from_json(obj)

    def with_field(self, ctx: FieldCtx) -> "TwoComplex":
        return TwoComplex(self.vertices, self.edges, self.faces, ctx, self.mode, self.punctures, self.meta)

    def __repr__(self):
        return (
            f"TwoComplex(|V|={len(self.vertices)}, |E|={self.n}, |F|={len(self.faces)}, "
            f"mode={self.mode}, punctures={len(self.punctures)}, {self.ctx!r})"
        )


# -- chains -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Chain:
    """A formal F-linear combination of cells of one grade."""

    complex: TwoComplex
    grade: int
    vec: np.ndarray

    def __post_init__(self):
        if self.grade not in (0, 1, 2):
            raise ValueError("grade must be 0, 1 or 2")
        v = np.asarray(self.vec, dtype=np.int64)
        if v.shape != (len(self._ids()),):
            raise ValueError(f"grade-{self.grade} chain needs {len(self._ids())} coefficients")
        object.__setattr__(self, "vec", v)

    def _ids(self) -> list[str]:
        g = self.complex
        if self.grade == 0:
            return list(g.vertices)
        if self.grade == 1:
            return [e.id for e in g.edges]
        return [f.id for f in g.faces]

    @classmethod
    def zero(cls, g: TwoComplex, grade: int) -> "Chain":
        size = (len(g.vertices), g.n, len(g.faces))[grade]
        return cls(g, grade, np.zeros(size, dtype=np.int64))

    @classmethod
    def from_dict(cls, g: TwoComplex, grade: int, coeffs: Mapping[str, int | FieldElement]) -> "Chain":
        c = cls.zero(g, grade)
        ids = {k: i for i, k in enumerate(c._ids())}
        v = c.vec.copy()
        for k, val in coeffs.items():
            if k not in ids:
                raise KeyError(f"{k} is not a grade-{grade} cell")
            v[ids[k]] = int(g.ctx.element(val))
        return cls(g, grade, v)

    @property
    def coeffs(self) -> dict[str, FieldElement]:
        return {
            k: FieldElement(self.complex.ctx, int(x)) for k, x in zip(self._ids(), self.vec) if x
        }

    def support(self) -> list[str]:
        return [k for k, x in zip(self._ids(), self.vec) if x]

    def is_zero(self) -> bool:
        return not self.vec.any()

    def _check(self, other: "Chain"):
        if other.complex is not self.complex or other.grade != self.grade:
            raise ValueError("chains live on different complexes or grades")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        return Chain(self.complex, self.grade, self.complex.ctx.add_table[self.vec, other.vec])

    def __neg__(self) -> "Chain":
        return Chain(self.complex, self.grade, self.complex.ctx.neg_table[self.vec])

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, k: int | FieldElement) -> "Chain":
        k = int(self.complex.ctx.element(k))
        return Chain(self.complex, self.grade, self.complex.ctx.mul_table[k, self.vec])

    def __rmul__(self, k):
        return self.scale(k)

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return other.complex is self.complex and other.grade == self.grade and np.array_equal(self.vec, other.vec)

    def __repr__(self):
        terms = " + ".join(f"{v!r}*{k}" for k, v in self.coeffs.items())
        return f"Chain[{self.grade}]({terms or '0'})"


def boundary(c: Chain) -> Chain:
    """Boundary map on chains; faces include punctures when grade is 2."""
    g = c.complex
    if c.grade == 0:
        raise ValueError("no boundary below grade 0")
    from .linalg import matvec

    m = g.boundary1 if c.grade == 1 else g.boundary2_all
    return Chain(g, c.grade - 1, matvec(m, c.vec, g.ctx))


# -- builders -----------------------------------------------------------------


def _faces_from_cycles(edges: list[Edge], cycles: dict[str, list[str]]) -> list[Face]:
    """Faces given as closed vertex cycles; every consecutive pair must be a unique edge."""
    lookup: dict[tuple[str, str], tuple[str, int]] = {}
    for e in edges:
        lookup[(e.tail, e.head)] = (e.id, 1)
        lookup[(e.head, e.tail)] = (e.id, -1)
    faces = []
    for fid, cyc in cycles.items():
        bnd = [lookup[(cyc[i], cyc[(i + 1) % len(cyc)])] for i in range(len(cyc))]
        faces.append(Face(fid, tuple(bnd)))
    return faces


def build_torus_square(m: int, ctx: FieldCtx) -> TwoComplex:
    """m x m square cellulation of the torus; edges point in the increasing coordinate."""
    if m < 1:
        raise ValueError("m must be >= 1")
    vid = lambda i, j: f"v{(j % m) * m + (i % m)}"  # noqa: E731
    vertices = [vid(i, j) for j in range(m) for i in range(m)]
    edges = []
    for j in range(m):
        for i in range(m):
            edges.append(Edge(f"h{j * m + i}", vid(i, j), vid(i + 1, j)))
    for j in range(m):
        for i in range(m):
            edges.append(Edge(f"u{j * m + i}", vid(i, j), vid(i, j + 1)))
    h = lambda i, j: f"h{(j % m) * m + (i % m)}"  # noqa: E731
    u = lambda i, j: f"u{(j % m) * m + (i % m)}"  # noqa: E731
    faces = [
        Face(f"f{j * m + i}", ((h(i, j), 1), (u(i + 1, j), 1), (h(i, j + 1), -1), (u(i, j), -1)))
        for j in range(m)
        for i in range(m)
    ]
    return TwoComplex(tuple(vertices), tuple(edges), tuple(faces), ctx, "closed",
                      meta={"builder": "torus_square", "m": m})


def build_square_disk(rows: int, cols: int, ctx: FieldCtx, holes: Iterable[tuple[int, int]] = ()) -> TwoComplex:
    """Planar rows x cols grid of square faces; ``holes`` lists (col, row) faces to puncture."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    vid = lambda i, j: f"v{j * (cols + 1) + i}"  # noqa: E731
    vertices = [vid(i, j) for j in range(rows + 1) for i in range(cols + 1)]
    edges = []
    for j in range(rows + 1):
        for i in range(cols):
            edges.append(Edge(f"h{i},{j}", vid(i, j), vid(i + 1, j)))
    for j in range(rows):
        for i in range(cols + 1):
            edges.append(Edge(f"u{i},{j}", vid(i, j), vid(i, j + 1)))
    faces = [
        Face(f"f{i},{j}", ((f"h{i},{j}", 1), (f"u{i + 1},{j}", 1), (f"h{i},{j + 1}", -1), (f"u{i},{j}", -1)))
        for j in range(rows)
        for i in range(cols)
    ]
    punct = tuple(f"f{i},{j}" for i, j in holes)
    return TwoComplex(tuple(vertices), tuple(edges), tuple(faces), ctx, "bounded", punct,
                      meta={"builder": "square_disk", "rows": rows, "cols": cols})


def build_wheel_disk(spokes: int, ctx: FieldCtx) -> TwoComplex:
    """Disk of ``spokes`` triangles around one interior hub vertex."""
    if spokes < 2:
        raise ValueError("need at least two spokes")
    vertices = ["c"] + [f"r{i}" for i in range(spokes)]
    edges = [Edge(f"s{i}", "c", f"r{i}") for i in range(spokes)]
    edges += [Edge(f"w{i}", f"r{i}", f"r{(i + 1) % spokes}") for i in range(spokes)]
    faces = [
        Face(f"t{i}", ((f"s{i}", 1), (f"w{i}", 1), (f"s{(i + 1) % spokes}", -1)))
        for i in range(spokes)
    ]
    return TwoComplex(tuple(vertices), tuple(edges), tuple(faces), ctx, "bounded",
                      meta={"builder": "wheel_disk", "spokes": spokes})


def build_cube_sphere(ctx: FieldCtx) -> TwoComplex:
    """Surface of the unit cube, faces oriented by the outward normal."""
    coords = [(x, y, z) for z in (0, 1) for y in (0, 1) for x in (0, 1)]
    name = {c: f"v{c[0]}{c[1]}{c[2]}" for c in coords}
    edges = []
    for c in coords:
        for k in range(3):
            if c[k] == 0:
                o = list(c)
                o[k] = 1
                edges.append(Edge(f"e{name[c][1:]}_{k}", name[c], name[tuple(o)]))
    cycles = {}
    for k in range(3):
        u, w = (k + 1) % 3, (k + 2) % 3
        for val in (0, 1):
            ring = []
            for a, b in ((0, 0), (1, 0), (1, 1), (0, 1)):
                p = [0, 0, 0]
                p[k], p[u], p[w] = val, a, b
                ring.append(name[tuple(p)])
            if val == 0:
                ring = ring[::-1]
            cycles[f"f{k}{val}"] = ring
    faces = _faces_from_cycles(edges, cycles)
    return TwoComplex(tuple(name[c] for c in coords), tuple(edges), tuple(faces), ctx, "closed",
                      meta={"builder": "cube_sphere"})


def build_honeycomb_torus(rows: int, cols: int, ctx: FieldCtx) -> TwoComplex:
    """Honeycomb (brick-wall) torus with rows*cols hexagons.

    Vertices sit at (x, y) with 0 <= x < 2*cols, 0 <= y < rows.  A vertical
    edge leaves (x, y) upward when x + y is even.  For odd ``rows`` the
    vertical identification is shifted by one column so every vertex keeps
    valence three.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    width = 2 * cols
    twist = rows % 2

    def wrap(x, y):
        shift = y // rows
        return ((x + shift * twist) % width, y - shift * rows)

    vid = lambda p: f"v{p[0]},{p[1]}"  # noqa: E731
    vertices = [vid((x, y)) for y in range(rows) for x in range(width)]
    edges = []
    for y in range(rows):
        for x in range(width):
            edges.append(Edge(f"h{x},{y}", vid((x, y)), vid(wrap(x + 1, y))))
    for y in range(rows):
        for x in range(width):
            if (x + y) % 2 == 0:
                edges.append(Edge(f"u{x},{y}", vid((x, y)), vid(wrap(x, y + 1))))
    h = lambda x, y: "h{},{}".format(*wrap(x, y))  # noqa: E731
    u = lambda x, y: "u{},{}".format(*wrap(x, y))  # noqa: E731
    faces = []
    for y in range(rows):
        for x in range(width):
            if (x + y) % 2 == 0:
                faces.append(Face(f"f{x},{y}", (
                    (h(x, y), 1), (h(x + 1, y), 1), (u(x + 2, y), 1),
                    (h(x + 1, y + 1), -1), (h(x, y + 1), -1), (u(x, y), -1),
                )))
    return TwoComplex(tuple(vertices), tuple(edges), tuple(faces), ctx, "closed",
                      meta={"builder": "honeycomb_torus", "rows": rows, "cols": cols})


def build_hexagon_pair(ctx: FieldCtx) -> TwoComplex:
    """Two adjacent hexagons f0, f1 sharing the edge [v0,v1], with a fixed labelling."""
    vertices = tuple(f"v{i}" for i in range(10))
    pairs = [(0, 1), (1, 9), (8, 9), (7, 8), (6, 7), (6, 0), (1, 2), (3, 2), (4, 3), (5, 4), (5, 0)]
    edges = [Edge(f"[v{a},v{b}]", f"v{a}", f"v{b}") for a, b in pairs]
    cycles = {
        "f0": ["v0", "v1", "v9", "v8", "v7", "v6"],
        "f1": ["v1", "v0", "v5", "v4", "v3", "v2"],
    }
    return TwoComplex(vertices, tuple(edges), tuple(_faces_from_cycles(edges, cycles)), ctx, "bounded",
                      meta={"builder": "hexagon_pair"})


class _UnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the lexicographically earlier name as representative
            lo, hi = sorted((ra, rb))
            self.parent[hi] = lo


def build_punctured_disk(k: int, ctx: FieldCtx, sides: int = 4) -> TwoComplex:
    """Disk with ``k`` punctures built as a chain of annuli.

    Each puncture is a ``sides``-gon surrounded by a ring of ``sides``
    quadrilaterals.  Consecutive rings share one outer edge, so the
    punctures are pairwise non-adjacent and each ring touches the outer
    boundary.  ``sides=2`` gives the smallest complexes (5k+1 edges);
    ``sides=4`` gives square plaquettes.  ``k = 0`` yields a single
    ``sides``-gon face.
    """
    if k < 0 or sides < 2:
        raise ValueError("need k >= 0 and sides >= 2")
    meta = {"builder": "punctured_disk", "k": k, "sides": sides}
    if k == 0:
        vertices = tuple(f"A{i}" for i in range(sides))
        edges = tuple(Edge(f"o{i}", f"A{i}", f"A{(i + 1) % sides}") for i in range(sides))
        face = Face("D", tuple((f"o{i}", 1) for i in range(sides)))
        return TwoComplex(vertices, edges, (face,), ctx, "bounded", meta=meta)

    s, half = sides, sides // 2
    uf = _UnionFind()
    replaced: dict[str, str] = {}  # glued outer edge -> surviving edge (reversed)
    for j in range(k - 1):
        uf.union(f"A{j}_{half}", f"A{j + 1}_1")
        uf.union(f"A{j}_{(half + 1) % s}", f"A{j + 1}_0")
        replaced[f"o{j + 1}_0"] = f"o{j}_{half}"

    vertices: list[str] = []
    for j in range(k):
        for i in range(s):
            vertices.append(f"a{j}_{i}")
        for i in range(s):
            r = uf.find(f"A{j}_{i}")
            if r not in vertices:
                vertices.append(r)
    edges: list[Edge] = []
    faces: list[Face] = []
    punctures = []
    for j in range(k):
        a = lambda i: f"a{j}_{i % s}"  # noqa: E731
        A = lambda i: uf.find(f"A{j}_{i % s}")  # noqa: E731
        edges += [Edge(f"p{j}_{i}", a(i), a(i + 1)) for i in range(s)]
        edges += [Edge(f"s{j}_{i}", a(i), A(i)) for i in range(s)]
        edges += [Edge(f"o{j}_{i}", A(i), A(i + 1)) for i in range(s) if f"o{j}_{i}" not in replaced]
        faces.append(Face(f"P{j}", tuple((f"p{j}_{i}", -1) for i in range(s))))
        punctures.append(f"P{j}")
        for i in range(s):
            outer = f"o{j}_{i}"
            outer_term = (replaced[outer], 1) if outer in replaced else (outer, -1)
            faces.append(Face(f"q{j}_{i}", (
                (f"p{j}_{i}", 1), (f"s{j}_{(i + 1) % s}", 1), outer_term, (f"s{j}_{i}", -1),
            )))
    return TwoComplex(tuple(vertices), tuple(edges), tuple(faces), ctx, "bounded", tuple(punctures), meta)


def _dual_id(x: str) -> str:
    return x[:-1] if x.endswith("*") else x + "*"


def dual(g: TwoComplex) -> TwoComplex:
    """Poincare dual of a closed complex.

    Face f becomes vertex f*, edge e becomes e* running from the face that
    contains e with sign +1 to the face that contains it with sign -1, and
    vertex v becomes the face v* whose boundary lists e* with sign +1 where
    v is the tail of e and -1 where v is the head.  The boundary order is the
    edge declaration order (no rotation system is stored).  With the
    ``*``-suffix naming, ``dual(dual(g))`` reproduces the original ids.
    """
    if g.mode != "closed":
        raise ComplexError("dual of a bounded complex is not supported")
    g.validate()
    vertices = tuple(_dual_id(f.id) for f in g.faces)
    edges = []
    for e in g.edges:
        occ = g.edge_faces(e.id)
        plus = next(f for f, s in occ if s == 1)
        minus = next(f for f, s in occ if s == -1)
        edges.append(Edge(_dual_id(e.id), _dual_id(plus), _dual_id(minus)))
    star: dict[str, list[tuple[str, int]]] = {v: [] for v in g.vertices}
    for e in g.edges:
        star[e.tail].append((_dual_id(e.id), 1))
        star[e.head].append((_dual_id(e.id), -1))
    faces = tuple(Face(_dual_id(v), tuple(star[v])) for v in g.vertices)
    return TwoComplex(vertices, tuple(edges), faces, g.ctx, "closed", meta={"builder": "dual"})


BUILDERS = {
    "torus": lambda ctx, **kw: build_torus_square(kw.get("m", 2), ctx),
    "honeycomb": lambda ctx, **kw: build_honeycomb_torus(kw.get("rows", 1), kw.get("cols", 1), ctx),
    "sphere-cube": lambda ctx, **kw: build_cube_sphere(ctx),
    "punctured-disk": lambda ctx, **kw: build_punctured_disk(kw.get("k", 1), ctx, kw.get("sides", 4)),
    "square-disk": lambda ctx, **kw: build_square_disk(kw.get("rows", 2), kw.get("cols", 2), ctx),
    "wheel": lambda ctx, **kw: build_wheel_disk(kw.get("spokes", 3), ctx),
}
