"""Storage, retrieval, dyon bookkeeping, braiding and the interferometer.

Charge and flux conventions
---------------------------
* ``X_e^a`` on ``e = [t, h]`` adds charge ``+a`` at ``h`` and ``-a`` at
  ``t``; charge ``a`` at ``v`` means ``g_v`` has eigenvalue ``w^a``.
* ``Z_e^{-b}`` adds flux ``+b`` at the face containing ``e`` with sign -1
  and ``-b`` at the face containing it with sign +1; flux ``b`` at ``f``
  means ``g_f^dag`` has eigenvalue ``w^b``.
* A dyon ``(a, b)`` created by ``X_e^a Z_e^{-b}`` therefore sits at
  ``(head, minus-face)`` and its antiparticle at ``(tail, plus-face)``.

The storage, retrieval and interferometer routines run on prime fields.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .complex import TwoComplex
from .errors import ProtocolError
from .frames import DenseLattice, PauliSumState, conditional_unitary
from .pauli import PauliOp, commutation_phase, multiply, power
from .statevec import (
    DenseState,
    apply_controlled_pauli,
    apply_fourier,
    apply_pauli,
    DEFAULT_CAP,
    build_hamiltonian,
    chain_state,
    measure_generator,
    outcome_probabilities,
    phases,
    project_code,
)


# -- transcripts --------------------------------------------------------------


def _plain(x):
    """Convert numpy scalars and complex numbers into JSON-ready values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    return x


@dataclass
class ProtocolTranscript:
    protocol: str
    seed: int | None
    steps: list[dict] = field(default_factory=list)
    fidelities: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def log(self, **entry):
        self.steps.append(_plain(entry))

    def to_json(self) -> dict:
        return _plain(asdict(self))

    def dumps(self) -> str:
        from .serialize import dumps

        return dumps(self.to_json())


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _require_prime(code):
    if code.ctx.ell != 1:
        raise ProtocolError("this protocol is implemented for prime fields only")


# -- strings and paths --------------------------------------------------------


def _plus_minus_faces(g: TwoComplex, eid: str) -> tuple[str | None, str | None]:
    """(face with sign +1, face with sign -1) among the active faces containing ``eid``."""
    plus = minus = None
    active = {f.id for f in g.active_faces}
    for fid, s in g.edge_faces(eid):
        if fid not in active:
            continue
        if s == 1:
            plus = fid
        else:
            minus = fid
    return plus, minus


def vertex_path(g: TwoComplex, u: str, w: str) -> list[tuple[int, int]]:
    """Shortest edge path u -> w as (edge index, +1 if traversed tail->head else -1)."""
    if u == w:
        return []
    adj: dict[str, list[tuple[int, str, int]]] = {v: [] for v in g.vertices}
    for j, e in enumerate(g.edges):
        if e.tail != e.head:
            adj[e.tail].append((j, e.head, 1))
            adj[e.head].append((j, e.tail, -1))
    prev: dict[str, tuple[str, int, int]] = {u: ("", -1, 0)}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for j, y, s in adj[x]:
            if y not in prev:
                prev[y] = (x, j, s)
                if y == w:
                    queue.clear()
                    break
                queue.append(y)
    if w not in prev:
        raise ProtocolError(f"no edge path from {u} to {w}")
    path = []
    cur = w
    while cur != u:
        x, j, s = prev[cur]
        path.append((j, s))
        cur = x
    return path[::-1]


def face_path(g: TwoComplex, f_from: str, f_to: str) -> list[tuple[int, int]]:
    """Shortest dual path between active faces as (edge index, Z exponent sign).

    The sign is chosen so that ``Z^(sign * b)`` on the crossed edges moves
    flux ``b`` from ``f_from`` to ``f_to``.
    """
    if f_from == f_to:
        return []
    prev: dict[str, tuple[str, int, int]] = {f_from: ("", -1, 0)}
    queue = deque([f_from])
    while queue:
        f = queue.popleft()
        for eid in sorted({e for e, _ in g.face_by_id[f].boundary}, key=g.edge_index.get):
            plus, minus = _plus_minus_faces(g, eid)
            if plus is None or minus is None:
                continue
            nb = minus if f == plus else plus
            if nb not in prev:
                # Z^c puts -c at the minus face and +c at the plus face
                sign = 1 if nb == plus else -1
                prev[nb] = (f, g.edge_index[eid], sign)
                queue.append(nb)
    if f_to not in prev:
        raise ProtocolError(f"no dual path from {f_from} to {f_to}")
    path = []
    cur = f_to
    while cur != f_from:
        f, j, s = prev[cur]
        path.append((j, s))
        cur = f
    return path[::-1]


def charge_string(g: TwoComplex, u: str, w: str, a: int) -> PauliOp:
    """X string moving charge ``a`` from ``u`` to ``w`` (creates -a at u, +a at w)."""
    ctx = g.ctx
    x = np.zeros(g.n, dtype=np.int64)
    for j, s in vertex_path(g, u, w):
        x[j] = (x[j] + s * a) % ctx.d
    return PauliOp(ctx, 0, x, np.zeros(g.n, dtype=np.int64))


def flux_string(g: TwoComplex, f_from: str, f_to: str, b: int) -> PauliOp:
    """Z string moving flux ``b`` from ``f_from`` to ``f_to``."""
    ctx = g.ctx
    z = np.zeros(g.n, dtype=np.int64)
    for j, s in face_path(g, f_from, f_to):
        z[j] = (z[j] + s * b) % ctx.d
    return PauliOp(ctx, 0, np.zeros(g.n, dtype=np.int64), z)


def syndrome(code, op: PauliOp) -> tuple[dict[str, int], dict[str, int]]:
    """Charges per vertex and fluxes per active face of ``op |vacuum>``."""
    d = code.ctx.d
    charges = {v: commutation_phase(gv, op) for v, gv in code.vertex_gens.items()}
    fluxes = {f: (-commutation_phase(gf, op)) % d for f, gf in code.face_gens.items()}
    return ({k: v for k, v in charges.items() if v}, {k: v for k, v in fluxes.items() if v})


def dyon_mass(d: int, U: float, h: float, a: int, b: int) -> float:
    """Energy of one isolated dyon (a, b) above the vacuum."""
    return 2 * U * (1 - np.cos(2 * np.pi * a / d)) + 2 * h * (1 - np.cos(2 * np.pi * b / d))


# -- dyon configurations ------------------------------------------------------


@dataclass
class Particle:
    a: int
    b: int
    v: str | None
    f: str | None


@dataclass
class DyonConfig:
    code: object
    particles: list[Particle] = field(default_factory=list)
    op: PauliOp | None = None
    string_record: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.op is None:
            self.op = PauliOp.identity(self.code.ctx, self.code.n)

    def _apply(self, p: PauliOp, what: str):
        self.op = multiply(p, self.op)
        self.string_record.append({"what": what, "op": str(p)})

    def total_labels(self) -> tuple[int, int]:
        d = self.code.ctx.d
        return (sum(p.a for p in self.particles) % d, sum(p.b for p in self.particles) % d)

    def expected_syndrome(self) -> tuple[dict[str, int], dict[str, int]]:
        d = self.code.ctx.d
        ch: dict[str, int] = {}
        fl: dict[str, int] = {}
        for p in self.particles:
            if p.v is not None:
                ch[p.v] = (ch.get(p.v, 0) + p.a) % d
            if p.f is not None:
                fl[p.f] = (fl.get(p.f, 0) + p.b) % d
        return ({k: v for k, v in ch.items() if v}, {k: v for k, v in fl.items() if v})

    def consistent(self) -> bool:
        return syndrome(self.code, self.op) == self.expected_syndrome()


def create_dyon_pair(code, edge: str, a: int, b: int, config: DyonConfig | None = None) -> DyonConfig:
    """Apply ``X_e^a Z_e^{-b}``: dyon (a, b) at (head, minus-face), antiparticle at (tail, plus-face)."""
    g = code.complex
    d = code.ctx.d
    a, b = a % d, b % d
    config = config or DyonConfig(code)
    if a == 0 and b == 0:
        return config
    e = g.edge_by_id[edge]
    plus, minus = _plus_minus_faces(g, edge)
    j = g.edge_index[edge]
    op = PauliOp.single(code.ctx, g.n, j, a=a, b=-b)
    config._apply(op, f"create ({a},{b}) on {edge}")
    config.particles.append(Particle(a, b, e.head if a else None, minus if b else None))
    config.particles.append(Particle(-a % d, -b % d, e.tail if a else None, plus if b else None))
    return config


def move_dyon(config: DyonConfig, index: int, v: str | None, f: str | None) -> DyonConfig:
    """Transport particle ``index`` to vertex ``v`` and face ``f`` with string operators."""
    g = config.code.complex
    p = config.particles[index]
    if p.a:
        if v is None:
            raise ProtocolError("a charged particle needs a target vertex")
        config._apply(charge_string(g, p.v, v, p.a), f"move charge {p.a} {p.v}->{v}")
        p.v = v
    if p.b:
        if f is None:
            raise ProtocolError("a particle with flux needs a target face")
        config._apply(flux_string(g, p.f, f, p.b), f"move flux {p.b} {p.f}->{f}")
        p.f = f
    return config


def fuse(config: DyonConfig, i: int, j: int) -> DyonConfig:
    """Fuse particles i and j once they share a location; labels add mod d."""
    d = config.code.ctx.d
    pi, pj = config.particles[i], config.particles[j]
    if (pi.a and pj.a and pi.v != pj.v) or (pi.b and pj.b and pi.f != pj.f):
        raise ProtocolError("particles must share a location to fuse")
    merged = Particle((pi.a + pj.a) % d, (pi.b + pj.b) % d, pi.v or pj.v, pi.f or pj.f)
    rest = [p for k, p in enumerate(config.particles) if k not in (i, j)]
    if merged.a or merged.b:
        merged.v = merged.v if merged.a else None
        merged.f = merged.f if merged.b else None
        rest.append(merged)
    config.particles = rest
    return config


def annihilate(config: DyonConfig, i: int, j: int) -> DyonConfig:
    """Move particle i onto particle j and fuse them."""
    pj = config.particles[j]
    move_dyon(config, i, pj.v, pj.f)
    return fuse(config, i, j)


def dyon_energy_check(code, edge: str, a: int, b: int, U: float = 1.0, h: float = 1.0,
                      engine: str = "dense") -> dict:
    """<H> - E0 for a freshly created pair versus twice the dyon mass."""
    cfg = create_dyon_pair(code, edge, a, b)
    ham = build_hamiltonian(code, U, h, cap=DEFAULT_CAP if engine == "dense" else None)
    e0 = ham.ground_energy_bound
    if engine == "dense":
        state = DenseLattice.ground(code).apply(cfg.op)
        excess = float(np.vdot(state.amps, ham.apply(state.amps)).real) - e0
    else:
        # every term is diagonal on Pauli excitations of the vacuum
        excess = 0.0
        for c, term, _ in ham.terms:
            t = commutation_phase(term, cfg.op)
            excess += 2 * c * (1 - np.cos(2 * np.pi * t / code.ctx.d))
    # a flux pushed across the outer boundary carries no face term
    expected = sum(
        dyon_mass(code.ctx.d, U, h, p.a if p.v else 0, p.b if p.f else 0) for p in cfg.particles
    )
    return {"excess": excess, "expected": expected, "particles": [asdict(p) for p in cfg.particles]}


# -- braiding -----------------------------------------------------------------


def edge_intersections(loop: PauliOp, string: PauliOp) -> list[tuple[int, int]]:
    """Signed crossings of a closed loop with a creation string, edge by edge.

    Each edge contributes ``tr(z_loop x_string - z_string x_loop)``: the
    local symplectic pairing of the two paths on that edge.
    """
    ctx = loop.ctx
    out = []
    for e in range(loop.n):
        c = (ctx.trace_table[ctx.mul_table[loop.z[e], string.x[e]]]
             - ctx.trace_table[ctx.mul_table[string.z[e], loop.x[e]]]) % ctx.d
        if c:
            out.append((e, int(c)))
    return out


@dataclass
class BraidResult:
    process: str
    symbolic: int
    numeric: int | None
    expected: int
    labels: dict
    crossings: list

    @property
    def ok(self) -> bool:
        return self.symbolic == self.expected and (self.numeric is None or self.numeric == self.symbolic)


def _phase_exponent(z: complex, d: int) -> int:
    if abs(abs(z) - 1) > 1e-8:
        raise ProtocolError(f"overlap {z} is not a pure phase")
    k = np.angle(z) * d / (2 * np.pi)
    r = int(round(k))
    if abs(k - r) > 1e-8:
        raise ProtocolError(f"phase {z} is not a power of w")
    return r % d


class BraidSetup:
    """Wheel-disk geometry: a hub vertex ``c`` surrounded by triangles ``t0..``.

    The stationary dyon sits at (c, t0), created by a charge string along
    spoke s0 and a flux string across the rim edge w0.  The moving dyon sits
    at (r1, t1), created on the rim edge w1, away from c and t0.
    """

    def __init__(self, code):
        g = code.complex
        if g.meta.get("builder") != "wheel_disk":
            raise ProtocolError("braiding runs on the wheel disk geometry")
        self.code = code
        self.g = g

    def create(self, which: str, a: int, b: int) -> PauliOp:
        g, ctx = self.g, self.code.ctx
        n = g.n
        if which == "static":
            cx = charge_string(g, "r0", "c", a)
            fz = PauliOp.single(ctx, n, g.edge_index["w0"], b=b)  # outside -> t0
            return multiply(cx, fz)
        # moving dyon (a, b) at (r1, t1): X^{-a} on w1 puts +a at its tail r1
        return PauliOp.single(ctx, n, g.edge_index["w1"], a=-a, b=b)

    def winding_loop(self, a: int, b: int, region: Sequence[str] = ("t0",)) -> PauliOp:
        """Counter-clockwise winding of (a, b) around the hub: charge loop plus flux loop."""
        code = self.code
        out = power(code.vertex_gens["c"], b)
        for f in region:
            out = multiply(out, power(code.face_gens[f], -a))
        return out

    def spin_loop(self, r: int) -> PauliOp:
        """2 pi rotation of the static dyon: its charge circles its own flux."""
        return power(self.code.face_gens["t0"], -r)


def _check_closed(code, loop: PauliOp):
    for name, g in code.generators:
        if commutation_phase(g, loop):
            raise ProtocolError(f"motion operator is not a closed loop (violates {name})")


def braid_phase(code, process: str, a: int = 0, b: int = 0, a2: int = 0, b2: int = 0,
                numeric: bool = True, region: Sequence[str] = ("t0",)) -> BraidResult:
    """Statistical phase exponent of a braid process, computed two ways.

    process ``"R2"``: (a, b) winds once around (a2, b2); expected a2 b + b2 a.
    ``"T"``: spin of (a, b); expected a b.  ``"R"``: exchange of two
    identical dyons (a, b); expected a b, realised through the spin loop.
    ``"C"``: winding of the conjugated pair (-a, -b) around (-a2, -b2).
    ``"none"``: (a, b) winds around an empty hub; expected 0.
    """
    _require_prime(code)
    d = code.ctx.d
    setup = BraidSetup(code)
    labels = {"a": a % d, "b": b % d, "a2": a2 % d, "b2": b2 % d}
    if process == "C":
        a, b, a2, b2 = -a, -b, -a2, -b2
        labels["conjugated"] = {"a": a % d, "b": b % d, "a2": a2 % d, "b2": b2 % d}
    if process in ("R2", "C"):
        static = setup.create("static", a2, b2)
        mover = setup.create("moving", a, b)
        loop = setup.winding_loop(a, b, region)
        expected = (a2 * b + b2 * a) % d
    elif process == "none":
        static = PauliOp.identity(code.ctx, code.n)
        mover = setup.create("moving", a, b)
        loop = setup.winding_loop(a, b, region)
        expected = 0
    elif process in ("T", "R"):
        static = setup.create("static", a, b)
        mover = PauliOp.identity(code.ctx, code.n)
        loop = setup.spin_loop(a)
        expected = (a * b) % d
    else:
        raise ValueError(f"unknown braid process {process!r}")
    _check_closed(code, loop)
    crossings = edge_intersections(loop, multiply(mover, static))
    symbolic = sum(c for _, c in crossings) % d
    num = None
    if numeric:
        vac = DenseLattice.ground(code)
        psi = vac.apply(static).apply(mover)
        after = psi.apply(loop)
        num = _phase_exponent(psi.inner(after) / psi.inner(psi), d)
    edges = code.complex.edges
    return BraidResult(process, symbolic, num, expected, labels,
                       [(edges[e].id, c) for e, c in crossings])


def torus_winding_phase(code, seed: int = 0) -> dict:
    """Group commutator of the two logical loops on a fixed ground state.

    The loops act on a degenerate vacuum and mix homology classes; only the
    commutator, a scalar, is a well-defined phase.
    """
    _require_prime(code)
    pair = code.logical_pairs[0]
    xb, zb = pair.xbar, pair.zbar
    comm = multiply(multiply(xb, zb), multiply(xb.dagger(), zb.dagger()))
    if not comm.is_scalar():  # pragma: no cover
        raise ProtocolError("logical loops do not commute up to a phase")
    from .statevec import ground_space

    gs = ground_space(code, seed=seed)
    v = gs.basis[:, 0]
    s = DenseState(code.ctx, code.n, v)
    out = apply_pauli(apply_pauli(apply_pauli(apply_pauli(s, zb.dagger()), xb.dagger()), zb), xb)
    numeric = _phase_exponent(np.vdot(v, out.amps), code.ctx.d)
    return {"symbolic": commutation_phase(xb, zb), "numeric": numeric, "caveat": "class-mixing"}


# -- storage ------------------------------------------------------------------


def _face_edges(g: TwoComplex, fid: str) -> dict[int, int]:
    """Edge index -> net orientation of the edge in the face boundary."""
    out: dict[int, int] = {}
    for eid, s in g.face_by_id[fid].boundary:
        j = g.edge_index[eid]
        out[j] = out.get(j, 0) + s
    return {j: s for j, s in out.items() if s}


def storage_face_order(code, omega, order: Sequence[str] | None = None,
                       max_nodes: int = 100_000) -> list[tuple[str, int]]:
    """Faces to measure with their correction edges, as [(face id, edge index)].

    Each correction edge lies in its own face, in no earlier face, and
    outside the support of ``omega``.  On a closed surface the last face is
    left unmeasured: its eigenvalue is fixed by the others.  The search is a
    depth-first backtracking over faces in id order; an explicit ``order``
    is only checked.
    """
    g = code.complex
    supp = set(omega.support()) if hasattr(omega, "support") else set(np.nonzero(omega)[0])
    supp = {g.edge_index[e] if isinstance(e, str) else int(e) for e in supp}
    faces = sorted(f.id for f in g.active_faces)
    need = len(faces) - 1 if g.mode == "closed" else len(faces)
    edges = {f: _face_edges(g, f) for f in faces}

    def choices(f, used):
        return [j for j in sorted(edges[f]) if j not in used and j not in supp]

    if order is not None:
        out, used = [], set()
        for f in order:
            if f not in edges:
                raise ProtocolError(f"unknown face {f!r} in storage order")
            c = choices(f, used)
            if not c:
                raise ProtocolError(
                    f"face {f} has no edge outside earlier faces and outside the cycle support")
            out.append((f, c[0]))
            used |= set(edges[f])
        if len({f for f, _ in out}) < need:
            raise ProtocolError(f"storage order measures {len(out)} faces, {need} required")
        return out

    nodes = 0
    best: list[str] = []

    def dfs(seq, used):
        nonlocal nodes, best
        if len(seq) == need:
            return seq
        if len(seq) > len(best):
            best = [f for f, _ in seq]
        for f in faces:
            nodes += 1
            if nodes > max_nodes:
                return None
            if any(f == s for s, _ in seq):
                continue
            c = choices(f, used)
            if c:
                r = dfs(seq + [(f, c[0])], used | set(edges[f]))
                if r is not None:
                    return r
        return None

    res = dfs([], set())
    if res is None:
        raise ProtocolError(
            f"no valid face ordering: longest admissible prefix {best} "
            f"(every remaining face has all edges in earlier faces or on the cycle)")
    return res


def logical_x(code, omega) -> PauliOp:
    """X^omega: tensor power of X along a cycle; shifts the class by [omega]."""
    vec = omega.vec if hasattr(omega, "vec") else np.asarray(omega)
    return PauliOp(code.ctx, 0, np.asarray(vec, dtype=np.int64), np.zeros(code.n, dtype=np.int64))


def class_state(code, omega, j: int) -> np.ndarray:
    """Normalised pi |j omega>, the code state of the class [j omega]."""
    vec = omega.vec if hasattr(omega, "vec") else np.asarray(omega)
    jv = (j * np.asarray(vec, dtype=np.int64)) % code.ctx.d
    v = project_code(code.generator_ops, chain_state(code.ctx, jv).amps)
    return v / np.linalg.norm(v)


def store(code, alphas, omega, order: Sequence[str] | None = None, seed=0):
    """Encode sum_j alpha_j |j> into the classes [j omega] by face measurements.

    Starts from sum_j alpha_j |j omega>, which already satisfies every vertex
    check because omega is a cycle.  Each face is then measured and an
    outcome ``j`` is undone with ``Z_e^{j o}`` on its correction edge.
    Returns (state, transcript).
    """
    _require_prime(code)
    ctx, d = code.ctx, code.ctx.d
    alphas = np.asarray(alphas, dtype=np.complex128)
    if alphas.shape != (d,):
        raise ProtocolError(f"expected {d} amplitudes")
    nrm = np.linalg.norm(alphas)
    if abs(nrm - 1) > 1e-9:
        raise ProtocolError(f"amplitudes have norm {nrm}, expected 1")
    vec = np.asarray(omega.vec if hasattr(omega, "vec") else omega, dtype=np.int64) % d
    if not vec.any() or (np.asarray(code.complex.boundary1) @ vec % d).any():
        raise ProtocolError("omega must be a nonzero cycle")
    rng = _rng(seed)
    tr = ProtocolTranscript("store", seed if not isinstance(seed, np.random.Generator) else None)
    plan = storage_face_order(code, vec, order)
    amps = np.zeros(ctx.q**code.n, dtype=np.complex128)
    for j in range(d):
        amps += alphas[j] * chain_state(ctx, (j * vec) % d).amps
    state = DenseState(ctx, code.n, amps)
    tr.log(step="prepare", alphas=alphas, cycle=[int(c) for c in vec])
    g = code.complex
    for fid, e in plan:
        j, state = measure_generator(state, code.face_gens[fid], rng)
        corr = None
        if j:
            o = _face_edges(g, fid)[e]
            c = (j * o) % d
            corr = PauliOp.single(ctx, code.n, e, b=c)
            state = apply_pauli(state, corr)
        tr.log(step="measure", face=fid, outcome=j, edge=g.edges[e].id,
               correction=str(corr) if corr is not None else None)
    oracle = project_code(code.generator_ops, amps)
    oracle /= np.linalg.norm(oracle)
    direct = sum(alphas[j] * class_state(code, vec, j) for j in range(d))
    tr.fidelities = {
        "projection_oracle": float(abs(np.vdot(oracle, state.amps)) ** 2),
        "class_sum": float(abs(np.vdot(direct, state.amps)) ** 2),
    }
    return state, tr


# -- retrieval ----------------------------------------------------------------


def readout_z(code, omega) -> PauliOp:
    """Logical Z normalised so that it has eigenvalue w^j on the class [j omega]."""
    vec = np.asarray(omega.vec if hasattr(omega, "vec") else omega, dtype=np.int64)
    xo = logical_x(code, vec)
    for pair in code.logical_pairs:
        t = commutation_phase(pair.zbar, xo)
        if t:
            return power(pair.zbar, pow(t, -1, code.ctx.d))
    raise ProtocolError("omega is homologically trivial: no logical Z detects it")


def retrieve(code, state: DenseState, omega, seed=0, tol: float = 1e-9):
    """Move the stored qudit onto a fresh ancilla register.

    The ancilla is appended as the last register in |0>.  The network is
    A += T, T -= A, A += T, where T is the logical qudit: addition reads T
    through the readout Z in the ancilla's Fourier basis, subtraction
    applies X^(-omega) controlled on the ancilla.  The ancilla ends in
    sum_j alpha_j |j> and the code register in the class [0].
    Returns (ancilla density matrix, transcript).
    """
    _require_prime(code)
    d = code.ctx.d
    for name, g in code.generators:
        p0 = outcome_probabilities(state, g)[0] / state.norm() ** 2
        if p0 < 1 - tol:
            raise ProtocolError(f"state is outside the code space (generator {name}: P(0) = {p0:.3g})")
    tr = ProtocolTranscript("retrieve", seed if not isinstance(seed, np.random.Generator) else None)
    tr.notes["registers"] = {"code": list(range(code.n)), "ancilla": code.n,
                             "convention": "the ancilla register carries the retrieved qudit"}
    zr = readout_z(code, omega)
    xo = logical_x(code, omega)
    anc = code.n
    s = state.append_register(0)

    def add_logical(s):
        s = apply_fourier(s, anc)
        s = apply_controlled_pauli(s, anc, zr)
        return apply_fourier(s, anc, inverse=True)

    s = add_logical(s)
    tr.log(step="ancilla += logical", op=str(zr))
    s = apply_controlled_pauli(s, anc, xo, mult=-1)
    tr.log(step="logical -= ancilla", op=str(xo))
    s = add_logical(s)
    tr.log(step="ancilla += logical", op=str(zr))
    m = s.split_last()
    rho = m @ m.conj().T
    tr.notes["ancilla_populations"] = np.real(np.diag(rho))
    # the code register is left in the class [0]
    c0 = class_state(code, omega, 0)
    tr.fidelities["code_register_class0"] = float(np.real(np.sum(np.abs(m @ c0.conj()) ** 2)))
    return rho, tr


def store_retrieve(code, alphas, omega, seed=0) -> dict:
    """Round trip used by the acceptance suite."""
    rng = _rng(seed)
    st, t1 = store(code, alphas, omega, seed=rng)
    rho, t2 = retrieve(code, st, omega, seed=rng)
    alphas = np.asarray(alphas, dtype=np.complex128)
    fid = float(np.real(np.vdot(alphas, rho @ alphas)))
    return {"store": t1, "retrieve": t2, "store_fidelity": t1.fidelities["projection_oracle"],
            "class_sum_fidelity": t1.fidelities["class_sum"], "retrieve_fidelity": fid}


# -- interferometer -----------------------------------------------------------


@dataclass(frozen=True)
class InterferometerLayout:
    """Cells used by the interferometer on a square-grid disk.

    ``e`` joins v2 (tail) to v0 (head).  The probe pair sits at (v0, f0) and
    (v1, f1); the probe hop over ``e`` takes the dyon at (v0, f0) to
    (v2, f2), from where it is dragged to (v5, f5).  The target pair sits at
    (v3, f3) and (v4, f4).
    """

    edge: str
    cells: dict

    def to_json(self) -> dict:
        return {"edge": self.edge, "cells": {k: list(v) for k, v in self.cells.items()}}


def interferometer_layout(g: TwoComplex) -> InterferometerLayout:
    """Default placement on ``build_square_disk(2, 3, ...)``."""
    if g.meta.get("builder") != "square_disk" or g.meta["rows"] < 2 or g.meta["cols"] < 3:
        raise ProtocolError("the interferometer layout needs a square disk with at least 2 rows and 3 columns")
    cols = g.meta["cols"]
    v = lambda i, j: f"v{j * (cols + 1) + i}"  # noqa: E731
    cells = {
        "0": (v(2, 1), "f1,0"),
        "1": (v(3, 0), "f2,0"),
        "2": (v(1, 1), "f1,1"),
        "3": (v(0, 0), "f0,0"),
        "4": (v(0, 2), "f0,1"),
        "5": (v(2, 2), "f2,1"),
    }
    lay = InterferometerLayout("h1,1", cells)
    validate_layout(g, lay)
    return lay


def validate_layout(g: TwoComplex, lay: InterferometerLayout):
    e = g.edges[g.edge_index[lay.edge]]
    if (e.tail, e.head) != (lay.cells["2"][0], lay.cells["0"][0]):
        raise ProtocolError(f"edge {lay.edge} must run from v2 to v0")
    for k, (v, f) in lay.cells.items():
        if v not in g.vertex_index or f not in g.face_by_id:
            raise ProtocolError(f"cell {k} refers to an unknown vertex or face")
        verts = set()
        for eid, _ in g.face_by_id[f].boundary:
            ed = g.edges[g.edge_index[eid]]
            verts |= {ed.tail, ed.head}
        if v not in verts:
            raise ProtocolError(f"cell {k}: vertex {v} is not on face {f}")
    probe = {x for k in "0125" for x in lay.cells[k]}
    target = {x for k in "34" for x in lay.cells[k]}
    if probe & target:
        raise ProtocolError(f"probe and target regions overlap at {sorted(probe & target)}")
    allc = [x for k in "012345" for x in lay.cells[k]]
    if len(set(allc)) != len(allc):
        raise ProtocolError("interferometer cells collide")


def _pair_op(code, c_plus, c_minus, a: int, b: int) -> PauliOp:
    """Creates (a, b) at cell c_plus and (-a, -b) at cell c_minus."""
    g = code.complex
    op = multiply(charge_string(g, c_minus[0], c_plus[0], a), flux_string(g, c_minus[1], c_plus[1], b))
    want_c = {k: v for k, v in ((c_plus[0], a % code.ctx.d), (c_minus[0], -a % code.ctx.d)) if v}
    want_f = {k: v for k, v in ((c_plus[1], b % code.ctx.d), (c_minus[1], -b % code.ctx.d)) if v}
    if syndrome(code, op) != (want_c, want_f):  # pragma: no cover - path construction guards this
        raise ProtocolError(f"string construction produced syndrome {syndrome(code, op)}")
    return op


def _cell_conditions(code, cell, a: int, b: int):
    v, f = cell
    return [(code.vertex_gens[v], a), (code.face_gens[f], -b)]


def interferometer_formulas(d: int, r: int, s: int, a: int, b: int, chi: float = 0.0) -> dict:
    """Closed-form ancilla expectations for the braided and trivial runs."""
    phi = 2 * np.pi * ((s * a + r * b) % d) / d
    delta = 1.0 if (2 * r) % d == 0 and (2 * s) % d == 0 else 0.0
    k = 2 * np.pi * ((r * s) % d) / d
    return {
        "phi_top": phi,
        "delta": delta,
        "sigma_x_tau": float(0.5 * (np.cos(chi + phi) + delta * np.cos(chi + phi - k))),
        "sigma_y_tau": float(0.5 * (np.sin(chi + phi) - delta * np.sin(chi + phi - k))),
        "sigma_x_triv": float(0.5 * (np.cos(chi) + delta * np.cos(chi - k))),
        "sigma_y_triv": float(0.5 * (np.sin(chi) - delta * np.sin(chi - k))),
    }


def _interferometer_branches(code, lay, ground, r, s, a, b, chi, braided: bool):
    """Exact (probability, <sigma_x>, <sigma_y>) for each step-2 outcome m in {0, 1}."""
    ctx, n, d = code.ctx, code.n, code.ctx.d
    e = code.complex.edge_index[lay.edge]
    c = lay.cells
    prep = multiply(_pair_op(code, c["3"], c["4"], a, b), _pair_op(code, c["0"], c["1"], r, s))
    psi1 = ground.apply(prep)
    hop = PauliOp.single(ctx, n, e, a=-r, b=s)  # X_e^{-r} Z_e^{s}
    drag = multiply(charge_string(code.complex, c["2"][0], c["5"][0], r),
                    flux_string(code.complex, c["2"][1], c["5"][1], s))
    at2 = _cell_conditions(code, c["2"], r, s) + _cell_conditions(code, c["5"], 0, 0)
    at5 = _cell_conditions(code, c["2"], 0, 0) + _cell_conditions(code, c["5"], r, s)
    loop = multiply(power(code.face_gens[c["5"][1]], -a), power(code.vertex_gens[c["5"][0]], b))
    readout = multiply(PauliOp.single(ctx, n, e, b=-s), PauliOp.single(ctx, n, e, a=r))
    out = []
    for m in (0, 1):
        sign = (-1) ** m
        st = psi1.add(psi1.apply(hop).scale(sign)).scale(0.5)
        p = st.norm() ** 2
        st = st.scale(1 / np.sqrt(p))
        steps = ["drag", "braid"] if braided else ["braid", "drag"]
        for name in steps:
            if name == "drag":
                st = conditional_unitary(st, drag, at2, at5, np.exp(1j * chi))
            else:
                st = st.apply(loop)
        st = conditional_unitary(st, drag, at2, at5)  # returns the probe to (v2, f2)
        z = st.inner(st.apply(readout).scale(sign))
        out.append((float(p), float(z.real), float(z.imag)))
    return out


def interferometer(code, probe=(0, 1), target=(1, 0), chi: float = 0.0, exact: bool = True,
                   shots: int = 10_000, seed=0, engine: str = "frame", csv_rows: bool = False) -> dict:
    """Statistics measurement with an ancilla-controlled probe hop.

    Runs the braided ordering and the trivial ordering, each with x- and
    y-basis ancilla readout.  ``exact`` averages the two step-2 outcomes
    with their exact weights; otherwise ``shots`` runs are sampled per
    (ordering, basis) with sub-seeds spawned from ``seed``.
    """
    _require_prime(code)
    d = code.ctx.d
    r, s = (int(x) % d for x in probe)
    a, b = (int(x) % d for x in target)
    if (r, s) == (0, 0):
        raise ProtocolError("probe (r, s) must be nonzero")
    lay = interferometer_layout(code.complex)
    if engine == "frame":
        ground = PauliSumState.ground(code)
    elif engine == "dense":
        ground = DenseLattice.ground(code)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    tr = ProtocolTranscript("interfere", None if isinstance(seed, np.random.Generator) else seed)
    tr.notes.update(layout=lay.to_json(), engine=engine, probe=[r, s], target=[a, b], chi=chi,
                    mode="exact" if exact else "sampled")
    branches = {
        "tau": _interferometer_branches(code, lay, ground, r, s, a, b, chi, True),
        "triv": _interferometer_branches(code, lay, ground, r, s, a, b, chi, False),
    }
    exact_vals = {}
    for key, br in branches.items():
        exact_vals[f"sigma_x_{key}"] = sum(p * x for p, x, _ in br)
        exact_vals[f"sigma_y_{key}"] = sum(p * y for p, _, y in br)
        tr.log(step=f"branches_{key}", outcomes=[{"m": m, "prob": p, "sigma_x": x, "sigma_y": y}
                                                 for m, (p, x, y) in enumerate(br)])
    report = {"exact": exact_vals, "formulas": interferometer_formulas(d, r, s, a, b, chi)}
    if exact:
        est = dict(exact_vals)
    else:
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(
            None if isinstance(seed, np.random.Generator) else seed)
        subs = ss.spawn(4)
        est, errs, rows = {}, {}, []
        for sub, (key, basis) in zip(subs, [("tau", "x"), ("tau", "y"), ("triv", "x"), ("triv", "y")]):
            rng = np.random.default_rng(sub)
            br = branches[key]
            ms = (rng.random(shots) < br[1][0]).astype(int)
            val = np.array([br[m][1 if basis == "x" else 2] for m in ms])
            outcome = np.where(rng.random(shots) < (1 + val) / 2, 1, -1)
            name = f"sigma_{basis}_{key}"
            est[name] = float(outcome.mean())
            errs[name] = float(outcome.std(ddof=1) / np.sqrt(shots)) if shots > 1 else float("nan")
            if csv_rows:
                rows += [(f"{key}", i, basis, int(m), int(o)) for i, (m, o) in enumerate(zip(ms, outcome))]
        report["stderr"] = errs
        report["shots"] = shots
        if csv_rows:
            report["csv_rows"] = rows
    num = complex(est["sigma_x_tau"], est["sigma_y_tau"])
    den = complex(est["sigma_x_triv"], est["sigma_y_triv"])
    report["estimate"] = est
    report["phi_top_ratio"] = float(np.angle(num / den) % (2 * np.pi)) if abs(den) > 1e-12 else None
    tr.fidelities = {k: float(v) for k, v in est.items()}
    report["transcript"] = tr
    return report


def interferometer_csv(report: dict) -> str:
    """CSV text (ordering, shot, basis, m, outcome) for a sampled run."""
    lines = ["ordering,shot,basis,m,outcome"]
    lines += [",".join(str(x) for x in row) for row in report.get("csv_rows", [])]
    return "\n".join(lines) + "\n"
