"""Vertex and face operators, logical operators and code parameters.

``g_v`` carries ``Z`` on edges pointing into ``v`` and ``Z^-1`` on edges
leaving it; ``g_f`` carries ``X^{o}`` on each boundary edge with
orientation ``o``.  Over F_{d^ell} with ell > 1 the generating set uses the
field-scaled copies ``g_v(lam)``, ``g_f(lam)`` for ``lam`` running over a
normal basis, so the stabilizer group is closed under F_{d^ell} scaling.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .complex import TwoComplex
from .errors import ComplexError
from .gfarith import FieldCtx
from .homology import h1
from .linalg import in_row_space, nullspace, rref
from .pauli import PauliOp, SymplecticRank, commutation_phase, product, symplectic_rank


def vertex_operator(g: TwoComplex, v: str, lam: int = 1) -> PauliOp:
    """Z-type star operator at ``v`` scaled by the field element index ``lam``."""
    ctx = g.ctx
    if v not in g.vertex_index:
        raise KeyError(f"unknown vertex {v}")
    z = np.zeros(g.n, dtype=np.int64)
    for j, e in enumerate(g.edges):
        if e.head == v:
            z[j] = ctx.add_table[z[j], lam]
        if e.tail == v:
            z[j] = ctx.add_table[z[j], ctx.neg_table[lam]]
    return PauliOp(ctx, 0, np.zeros(g.n, dtype=np.int64), z)


def face_operator(g: TwoComplex, f: str, lam: int = 1) -> PauliOp:
    """X-type plaquette operator with exponent ``o_k * lam`` on each boundary edge."""
    ctx = g.ctx
    if f not in g.face_index:
        raise KeyError(f"unknown face {f}")
    x = np.zeros(g.n, dtype=np.int64)
    for eid, s in g.face_by_id[f].boundary:
        j = g.edge_index[eid]
        term = lam if s == 1 else int(ctx.neg_table[lam])
        x[j] = ctx.add_table[x[j], term]
    return PauliOp(ctx, 0, x, np.zeros(g.n, dtype=np.int64))


def edge_x(g: TwoComplex, exps: np.ndarray) -> PauliOp:
    return PauliOp(g.ctx, 0, exps, np.zeros(g.n, dtype=np.int64))


def edge_z(g: TwoComplex, exps: np.ndarray) -> PauliOp:
    return PauliOp(g.ctx, 0, np.zeros(g.n, dtype=np.int64), exps)


def signed_edges_vector(g: TwoComplex, signed) -> np.ndarray:
    """Field vector of a signed edge list such as a face boundary."""
    v = np.zeros(g.n, dtype=np.int64)
    for eid, s in signed:
        j = g.edge_index[eid]
        v[j] = g.ctx.add_table[v[j], g.ctx.from_int(s)]
    return v


def trace_one_element(ctx: FieldCtx) -> int:
    """Smallest field element with trace 1 (equals 1 for prime fields)."""
    for k in range(1, ctx.q):
        if ctx.trace_table[k] == 1:
            return k
    raise ArithmeticError("trace map is zero")  # pragma: no cover


def _inverse_matrix(m: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    k = m.shape[0]
    aug = np.concatenate([m, np.eye(k, dtype=np.int64)], axis=1)
    r, piv = rref(aug, ctx)
    if piv[:k] != list(range(k)):
        raise ArithmeticError("singular pairing matrix")
    return r[:, k:]


@dataclass(frozen=True)
class LogicalPair:
    name: str
    xbar: PauliOp
    zbar: PauliOp
    x_support: tuple[str, ...] = ()
    z_path: tuple[str, ...] = ()


@dataclass(eq=False)
class StabilizerCode:
    complex: TwoComplex
    vertex_gens: dict[str, PauliOp] = field(init=False)
    face_gens: dict[str, PauliOp] = field(init=False)

    def __post_init__(self):
        g = self.complex
        self.vertex_gens = {v: vertex_operator(g, v) for v in g.vertices}
        self.face_gens = {f.id: face_operator(g, f.id) for f in g.active_faces}
        trivial = [k for k, op in self.terms if op.is_identity()]
        if trivial:
            warnings.warn(
                f"dropping {len(trivial)} trivial generator(s) (identity operators): {trivial}",
                stacklevel=2,
            )

    @property
    def ctx(self) -> FieldCtx:
        return self.complex.ctx

    @property
    def n(self) -> int:
        return self.complex.n

    @cached_property
    def terms(self) -> list[tuple[str, PauliOp]]:
        """Every Hamiltonian term, including identities from degenerate cells.

        Names are ``v:<id>`` and ``f:<id>``; for ell > 1 the normal-basis
        scale is appended as ``@<index>``.
        """
        g, ctx = self.complex, self.ctx
        basis = ctx.normal_basis()
        out = []
        for lam in basis:
            tag = "" if ctx.ell == 1 else f"@{lam}"
            out += [(f"v:{v}{tag}", vertex_operator(g, v, lam)) for v in g.vertices]
        for lam in basis:
            tag = "" if ctx.ell == 1 else f"@{lam}"
            out += [(f"f:{f.id}{tag}", face_operator(g, f.id, lam)) for f in g.active_faces]
        return out

    @cached_property
    def generators(self) -> list[tuple[str, PauliOp]]:
        """Nontrivial generators of the stabilizer group."""
        return [(k, op) for k, op in self.terms if not op.is_identity()]

    @property
    def generator_ops(self) -> list[PauliOp]:
        return [op for _, op in self.generators]

    @cached_property
    def symplectic(self) -> SymplecticRank:
        names, ops = zip(*self.generators) if self.generators else ((), ())
        return symplectic_rank(list(ops), self.ctx, self.n, names=list(names))

    @cached_property
    def homology(self):
        return h1(self.complex)

    @property
    def code_dim(self) -> int:
        return self.symplectic.code_dim

    @cached_property
    def logical_pairs(self) -> list[LogicalPair]:
        return logical_operators(self)

    def __repr__(self):
        return f"StabilizerCode(n={self.n}, generators={len(self.generators)}, {self.ctx!r})"


# -- identities ---------------------------------------------------------------


def puncture_x(g: TwoComplex, pid: str) -> PauliOp:
    """C_j(X): X string around a puncture with the orientation induced by the surface."""
    return edge_x(g, signed_edges_vector(g, g.puncture_boundary(pid)))


def outer_x(g: TwoComplex) -> PauliOp:
    """C_dGamma(X): X string along the outer boundary."""
    return edge_x(g, signed_edges_vector(g, g.outer_boundary))


def global_identities(code: StabilizerCode) -> dict:
    """Check the product identities over all vertex and all active face operators."""
    g = code.complex
    pv = product(list(code.vertex_gens.values()), code.ctx, code.n)
    pf = product(list(code.face_gens.values()), code.ctx, code.n)
    report = {
        "mode": g.mode,
        "vertex_product": str(pv),
        "vertex_product_is_identity": pv.is_identity(),
        "face_product": str(pf),
    }
    if g.mode == "closed":
        report["face_identity_holds"] = pf.is_identity()
    else:
        rhs = outer_x(g)
        for p in g.punctures:
            rhs = rhs * puncture_x(g, p)
        report["face_expected"] = str(rhs)
        report["face_identity_holds"] = pf == rhs
    report["ok"] = report["vertex_product_is_identity"] and report["face_identity_holds"]
    return report


# -- logical operators --------------------------------------------------------


def _puncture_path(g: TwoComplex, pid: str) -> list[str]:
    """Edges crossed by a shortest dual path from puncture ``pid`` to the outer boundary.

    The walk moves between active faces through shared edges and never
    enters a puncture.  Ties are broken by edge declaration order.
    """
    outer = {e for e, _ in g.outer_boundary}
    active = {f.id for f in g.active_faces}
    faces_of: dict[str, list[str]] = {e.id: [] for e in g.edges}
    for f in g.faces:
        for e, _ in f.boundary:
            if f.id not in faces_of[e]:
                faces_of[e].append(f.id)
    order = g.edge_index

    def face_edges(fid):
        return sorted({e for e, _ in g.face_by_id[fid].boundary}, key=order.get)

    start = face_edges(pid)
    prev: dict[str, tuple[str | None, str]] = {}
    queue: deque[str] = deque()
    for e in start:
        for f in faces_of[e]:
            if f in active and f not in prev:
                prev[f] = (None, e)
                queue.append(f)
    while queue:
        f = queue.popleft()
        for e in face_edges(f):
            if e in outer:
                path = [e]
                cur: str | None = f
                while cur is not None:
                    back, via = prev[cur]
                    path.append(via)
                    cur = back
                return path[::-1]
            for nb in faces_of[e]:
                if nb in active and nb not in prev:
                    prev[nb] = (f, e)
                    queue.append(nb)
    raise ComplexError(f"no dual path from puncture {pid} to the outer boundary")


def _orientation(g: TwoComplex, fid: str, eid: str) -> int:
    return sum(s for e, s in g.face_by_id[fid].boundary if e == eid)


def puncture_z(g: TwoComplex, pid: str) -> tuple[PauliOp, list[str]]:
    """C_j(Z): Z string along the dual path, normalised against C_j(X)."""
    ctx = g.ctx
    path = _puncture_path(g, pid)
    mu = trace_one_element(ctx)
    z = np.zeros(g.n, dtype=np.int64)
    # first exponent: tr(z0 * x0) = 1 with x0 = -o_{P, e0}
    o_p = _orientation(g, pid, path[0])
    cur = int(ctx.mul_table[mu, ctx.from_int(-o_p)])
    z[g.edge_index[path[0]]] = cur
    active = {f.id for f in g.active_faces}
    for a, b in zip(path, path[1:]):
        # the unique active face containing both crossed edges
        shared = [f for f in active if _orientation(g, f, a) and _orientation(g, f, b)]
        f = sorted(shared, key=g.face_index.get)[0]
        oa, ob = _orientation(g, f, a), _orientation(g, f, b)
        # oa * z_a + ob * z_b = 0  =>  z_b = -oa/ob * z_a
        coef = ctx.from_int(-oa * ob)  # ob = +-1 so 1/ob = ob
        cur = int(ctx.mul_table[coef, cur])
        z[g.edge_index[b]] = cur
    return edge_z(g, z), path


def _generic_logicals(code: StabilizerCode) -> list[LogicalPair]:
    g, ctx = code.complex, code.ctx
    hom = code.homology
    if hom.rank_h1 == 0:
        return []
    omegas = np.array([c.vec for c in hom.basis_cycles])
    # cocycles: z with sum_e o_{f,e} z_e = 0 for each face, independent of vertex stars
    cocycle_space = nullspace(g.boundary2.T, ctx) if g.boundary2.shape[1] else np.eye(g.n, dtype=np.int64)
    coboundaries = g.boundary1.copy()
    chosen = []
    span = coboundaries
    for z in cocycle_space:
        if span.shape[0]:
            r, piv = rref(span, ctx)
            res, _ = in_row_space(r, piv, z, ctx)
        else:
            res = z
        if res.any():
            chosen.append(z)
            span = np.vstack([span, z[None, :]])
    zs = np.array(chosen)
    k = hom.rank_h1
    pairing = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            acc = 0
            for e in range(g.n):
                acc = ctx.add_table[acc, ctx.mul_table[zs[i, e], omegas[j, e]]]
            pairing[i, j] = acc
    inv = _inverse_matrix(pairing, ctx)
    mu = trace_one_element(ctx)
    pairs = []
    for i in range(k):
        zi = np.zeros(g.n, dtype=np.int64)
        for j in range(k):
            zi = ctx.add_table[zi, ctx.mul_table[inv[i, j], zs[j]]]
        zi = ctx.mul_table[mu, zi]
        x_sup = tuple(g.edges[e].id for e in np.nonzero(omegas[i])[0])
        z_sup = tuple(g.edges[e].id for e in np.nonzero(zi)[0])
        pairs.append(LogicalPair(f"L{i}", edge_x(g, omegas[i]), edge_z(g, zi), x_sup, z_sup))
    return pairs


def logical_operators(code: StabilizerCode) -> list[LogicalPair]:
    """Logical (Xbar, Zbar) pairs with commutation_phase(Zbar, Xbar) = 1.

    With punctures, Xbar_j loops around puncture j and Zbar_j runs along a
    dual path from puncture j to the outer boundary.  Otherwise Xbar_i runs
    along the H1 basis cycles and Zbar_i along a dual cocycle basis
    normalised to pair to the identity matrix.
    """
    g = code.complex
    if g.punctures:
        pairs = []
        for p in g.punctures:
            zop, path = puncture_z(g, p)
            xop = puncture_x(g, p)
            x_sup = tuple(e for e, _ in g.puncture_boundary(p))
            pairs.append(LogicalPair(p, xop, zop, x_sup, tuple(path)))
    else:
        pairs = _generic_logicals(code)
    for lp in pairs:
        for name, op in code.generators:
            if commutation_phase(lp.xbar, op) or commutation_phase(lp.zbar, op):
                raise ComplexError(f"logical {lp.name} fails to commute with {name}")
    return pairs


def logical_relations(code: StabilizerCode) -> dict:
    """Commutation matrix between logical Zbar_i and Xbar_j (identity expected)."""
    pairs = code.logical_pairs
    m = [[commutation_phase(a.zbar, b.xbar) for b in pairs] for a in pairs]
    xx = all(commutation_phase(a.xbar, b.xbar) == 0 for a in pairs for b in pairs)
    zz = all(commutation_phase(a.zbar, b.zbar) == 0 for a in pairs for b in pairs)
    ok = xx and zz and all(m[i][j] == (1 if i == j else 0) for i in range(len(m)) for j in range(len(m)))
    return {"zx_matrix": m, "xx_commute": xx, "zz_commute": zz, "ok": ok}


@dataclass(frozen=True)
class CodeParameters:
    n: int
    code_dim: int
    generator_rank: int
    rank_h1: int
    class_count: int

    def consistent(self) -> bool:
        return self.code_dim == self.class_count


def code_parameters(code: StabilizerCode) -> CodeParameters:
    s = code.symplectic
    hom = code.homology
    return CodeParameters(code.n, s.code_dim, s.rank, hom.rank_h1, hom.class_count)


def in_generated_group(op: PauliOp, gens: list[PauliOp]) -> bool:
    """Whether a Pauli operator (phase included) lies in the F_d-span of commuting generators."""
    ctx = op.ctx
    prime = FieldCtx(ctx.d)
    from .pauli import _prime_expansion, power, symplectic_vector

    if not gens:
        return op.is_identity()
    m = _prime_expansion(ctx, np.array([symplectic_vector(g) for g in gens]))
    target = _prime_expansion(ctx, symplectic_vector(op)[None, :])[0]
    from .linalg import solve

    sol = solve(m.T, target, prime)
    if sol is None:
        return False
    acc = PauliOp.identity(ctx, op.n)
    for k, g in zip(sol, gens):
        if k:
            acc = acc * power(g, int(k))
    return acc == op


__all__ = [
    "StabilizerCode",
    "LogicalPair",
    "CodeParameters",
    "vertex_operator",
    "face_operator",
    "global_identities",
    "logical_operators",
    "logical_relations",
    "code_parameters",
    "puncture_x",
    "puncture_z",
    "outer_x",
    "in_generated_group",
    "trace_one_element",
]
