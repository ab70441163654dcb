"""Dense state-vector simulation over (d^ell)^n amplitudes.

Basis ordering: register ``e`` (edge ``e`` in declaration order, then any
ancilla registers) is digit ``e`` of the little-endian base-q index, i.e.
``index = sum_e x_e q^e``.  In a C-order reshape to ``(q,)*n`` register
``e`` is axis ``n - 1 - e``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import CapExceededError, PauliError, ProtocolError
from .gfarith import FieldCtx, FieldElement
from .pauli import PauliOp, check_commuting, power

DEFAULT_CAP = 2**20
DENSE_MATRIX_CAP = 2**12
DEGENERACY_TOL = 1e-8


def check_cap(size: int, cap: int = DEFAULT_CAP) -> None:
    if size > cap:
        raise CapExceededError(size, cap)


def phases(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


def _digit(idx: np.ndarray, e: int, q: int) -> np.ndarray:
    return (idx // q**e) % q


# -- states -------------------------------------------------------------------


@dataclass(eq=False)
class DenseState:
    ctx: FieldCtx
    n: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (self.ctx.q**self.n,):
            raise ValueError(f"expected {self.ctx.q ** self.n} amplitudes, got {self.amps.shape}")

    @property
    def size(self) -> int:
        return self.amps.size

    @classmethod
    def basis(cls, ctx: FieldCtx, n: int, digits=None, cap: int = DEFAULT_CAP) -> "DenseState":
        check_cap(ctx.q**n, cap)
        amps = np.zeros(ctx.q**n, dtype=np.complex128)
        amps[basis_index(ctx, digits if digits is not None else [0] * n)] = 1.0
        return cls(ctx, n, amps)

    def copy(self) -> "DenseState":
        return DenseState(self.ctx, self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "DenseState":
        nrm = self.norm()
        if nrm < 1e-12:
            raise ProtocolError("cannot normalise a zero vector")
        return DenseState(self.ctx, self.n, self.amps / nrm)

    def inner(self, other: "DenseState") -> complex:
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "DenseState") -> float:
        return abs(self.inner(other)) ** 2 / (self.norm() ** 2 * other.norm() ** 2)

    def append_register(self, value: int = 0) -> "DenseState":
        """Add one register in basis state ``value`` as the most significant digit."""
        check_cap(self.size * self.ctx.q)
        out = np.zeros(self.size * self.ctx.q, dtype=np.complex128)
        out[value * self.size:(value + 1) * self.size] = self.amps
        return DenseState(self.ctx, self.n + 1, out)

    def register_marginal(self, reg: int) -> np.ndarray:
        """Probability distribution of one register."""
        t = np.abs(self.amps.reshape((self.ctx.q,) * self.n)) ** 2
        axes = tuple(a for a in range(self.n) if a != self.n - 1 - reg)
        return t.sum(axis=axes)

    def split_last(self) -> np.ndarray:
        """Amplitudes reshaped to (q, q^(n-1)): row k is the slice with last register = k."""
        return self.amps.reshape(self.ctx.q, -1)

    def __matmul__(self, other):
        return self.inner(other)


def basis_index(ctx: FieldCtx, digits) -> int:
    return int(sum(int(x) * ctx.q**e for e, x in enumerate(digits)))


def chain_state(ctx: FieldCtx, vec, cap: int = DEFAULT_CAP) -> DenseState:
    """Computational basis state |omega> of an edge chain (field-index vector)."""
    return DenseState.basis(ctx, len(vec), vec, cap)


# -- Pauli action -------------------------------------------------------------


def pad(p: PauliOp, n: int) -> PauliOp:
    """Extend a Pauli operator with identities up to ``n`` registers."""
    if p.n == n:
        return p
    if p.n > n:
        raise PauliError("cannot shrink an operator")
    z = np.zeros(n - p.n, dtype=np.int64)
    return PauliOp(p.ctx, p.phase, np.concatenate([p.x, z]), np.concatenate([p.z, z]))


@lru_cache(maxsize=64)
def pauli_action(p: PauliOp) -> tuple[np.ndarray, np.ndarray]:
    """(target index, phase exponent) arrays with ``p |i> = w^phase[i] |target[i]>``."""
    ctx = p.ctx
    q, n = ctx.q, p.n
    idx = np.arange(q**n, dtype=np.int64)
    target = idx.copy()
    ph = np.full(q**n, p.phase, dtype=np.int64)
    for e in p.support():
        dig = _digit(idx, e, q)
        if p.z[e]:
            ph += ctx.trace_table[ctx.mul_table[p.z[e], dig]]
        if p.x[e]:
            target += (ctx.add_table[dig, p.x[e]] - dig) * q**e
    target.setflags(write=False)
    ph = (ph % ctx.d).astype(np.int64)
    ph.setflags(write=False)
    return target, ph


def apply_pauli_array(p: PauliOp, amps: np.ndarray) -> np.ndarray:
    """Apply ``p`` to a vector or to the columns of an (N, K) array."""
    target, ph = pauli_action(p)
    w = phases(p.ctx.d)[ph]
    out = np.empty_like(amps)
    if amps.ndim == 1:
        out[target] = w * amps
    else:
        out[target] = w[:, None] * amps
    return out


def apply_pauli(s: DenseState, p: PauliOp) -> DenseState:
    p = pad(p, s.n)
    return DenseState(s.ctx, s.n, apply_pauli_array(p, s.amps))


def pauli_matrix(p: PauliOp) -> sp.csr_matrix:
    target, ph = pauli_action(p)
    size = target.size
    return sp.csr_matrix((phases(p.ctx.d)[ph], (target, np.arange(size))), shape=(size, size))


def expectation_pauli(s: DenseState, p: PauliOp) -> complex:
    return complex(np.vdot(s.amps, apply_pauli(s, p).amps))


# -- single- and two-qudit gates ----------------------------------------------


def fourier_matrix(ctx: FieldCtx) -> np.ndarray:
    """F = q^{-1/2} sum_{a,b} w^{tr(ab)} |b><a|."""
    tr = ctx.trace_table[ctx.mul_table]
    return phases(ctx.d)[tr] / np.sqrt(ctx.q)


def unitarity_error(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def apply_single(s: DenseState, reg: int, u: np.ndarray) -> DenseState:
    """Apply a q x q matrix to one register."""
    q = s.ctx.q
    t = s.amps.reshape(q ** (s.n - 1 - reg), q, q**reg)
    return DenseState(s.ctx, s.n, np.einsum("ab,ibj->iaj", u, t).reshape(-1))


def apply_fourier(s: DenseState, reg: int, inverse: bool = False) -> DenseState:
    f = fourier_matrix(s.ctx)
    return apply_single(s, reg, f.conj().T if inverse else f)


def apply_permutation(s: DenseState, target: np.ndarray) -> DenseState:
    out = np.empty_like(s.amps)
    out[target] = s.amps
    return DenseState(s.ctx, s.n, out)


def sum_gate_target(ctx: FieldCtx, n: int, control: int, target: int, coef: int = 1) -> np.ndarray:
    """Index map of |j, k> -> |j, k + coef * j> (control j, target k)."""
    q = ctx.q
    idx = np.arange(q**n, dtype=np.int64)
    j = _digit(idx, control, q)
    k = _digit(idx, target, q)
    c = int(coef) if isinstance(coef, FieldElement) else ctx.from_int(coef)
    newk = ctx.add_table[k, ctx.mul_table[c, j]]
    return idx + (newk - k) * q**target


def apply_sum_gate(s: DenseState, control: int, target: int, sign: int = 1) -> DenseState:
    """Modular addition (``sign=+1``) or subtraction (``sign=-1``) of control into target."""
    return apply_permutation(s, sum_gate_target(s.ctx, s.n, control, target, sign))


def apply_controlled_pauli(s: DenseState, control: int, p: PauliOp, mult: int = 1) -> DenseState:
    """sum_k |k><k|_control (x) p^(mult * k) on the remaining registers."""
    q, ctx = s.ctx.q, s.ctx
    if ctx.ell != 1:
        raise ProtocolError("controlled Pauli gates are implemented for prime fields")
    out = np.zeros_like(s.amps)
    idx = np.arange(s.size)
    dig = _digit(idx, control, q)
    p = pad(p, s.n)
    for k in range(q):
        mask = dig == k
        if not mask.any():
            continue
        part = np.where(mask, s.amps, 0)
        out += apply_pauli_array(power(p, mult * k), part)
    return DenseState(ctx, s.n, out)


# -- Hamiltonian --------------------------------------------------------------


@dataclass(eq=False)
class HamiltonianSpec:
    ctx: FieldCtx
    n: int
    U: float
    h: float
    terms: list[tuple[float, PauliOp, str]]

    @property
    def size(self) -> int:
        return self.ctx.q**self.n

    @property
    def ground_energy_bound(self) -> float:
        """-2 * sum of coefficients: attained exactly when the code space is nonempty."""
        return -2.0 * sum(c for c, _, _ in self.terms)

    def matrix(self, cap: int = DEFAULT_CAP) -> sp.csr_matrix:
        check_cap(self.size, cap)
        acc = sp.csr_matrix((self.size, self.size), dtype=np.complex128)
        for c, p, _ in self.terms:
            m = pauli_matrix(p)
            acc = acc - c * (m + m.getH())
        return acc.tocsr()

    def dense(self, cap: int = DENSE_MATRIX_CAP) -> np.ndarray:
        check_cap(self.size, cap)
        return self.matrix().toarray()

    def apply(self, amps: np.ndarray) -> np.ndarray:
        out = np.zeros_like(amps)
        for c, p, _ in self.terms:
            out -= c * (apply_pauli_array(p, amps) + apply_pauli_array(p.dagger(), amps))
        return out

    def energy(self, s: DenseState) -> float:
        return float(np.vdot(s.amps, self.apply(s.amps)).real / s.norm() ** 2)


def build_hamiltonian(code, U: float = 1.0, h: float = 1.0, cap: int | None = DEFAULT_CAP) -> HamiltonianSpec:
    """H = -U sum_v (g_v + g_v^dag) - h sum_f (g_f + g_f^dag) on the code's complex."""
    if U <= 0 or h <= 0:
        raise ValueError("U and h must be positive")
    if cap is not None:
        check_cap(code.ctx.q**code.n, cap)
    terms = [(U if name.startswith("v:") else h, op, name) for name, op in code.terms]
    check_commuting([t[1] for t in terms], [t[2] for t in terms])
    return HamiltonianSpec(code.ctx, code.n, U, h, terms)


# -- ground space by sequential projection -----------------------------------


def project_generator(p: PauliOp, amps: np.ndarray, j: int = 0) -> np.ndarray:
    """P_j(p) amps with P_j = (1/d) sum_k w^{-jk} p^k (eigenvalue w^j)."""
    d = p.ctx.d
    w = phases(d)
    acc = amps.copy()
    cur = amps
    for k in range(1, d):
        cur = apply_pauli_array(p, cur)
        acc = acc + w[(-j * k) % d] * cur
    if not np.allclose(apply_pauli_array(p, cur), amps, atol=1e-9):
        raise PauliError("generator does not satisfy g^d = I")
    return acc / d


def project_code(gens, amps: np.ndarray) -> np.ndarray:
    for g in gens:
        amps = project_generator(g, amps)
    return amps


@dataclass
class GroundSpace:
    dim: int
    energy: float
    basis: np.ndarray = field(repr=False)
    residual: float = 0.0
    probes: int = 0


def diagonal_sector(gens, size: int) -> np.ndarray:
    """Basis indices fixed (with phase 1) by every Z-type generator."""
    mask = np.ones(size, dtype=bool)
    for g in gens:
        if not g.x.any():
            _, ph = pauli_action(g)
            mask &= ph == 0
    return np.nonzero(mask)[0]


def _restricted_actions(gens, sector: np.ndarray):
    """Actions of the non-diagonal generators on the diagonal sector, in sector coordinates."""
    pos = np.full(int(sector.max()) + 1 if sector.size else 0, -1, dtype=np.int64)
    pos[sector] = np.arange(sector.size)
    out = []
    for g in gens:
        if not g.x.any():
            continue
        target, ph = pauli_action(g)
        t = target[sector]
        local = pos[t] if t.size and t.max() < pos.size else np.full(t.size, -1)
        if (local < 0).any():
            raise PauliError("generator does not preserve the diagonal sector")
        out.append((g.ctx.d, local, phases(g.ctx.d)[ph[sector]]))
    return out


def _project_restricted(actions, v: np.ndarray) -> np.ndarray:
    for d, local, w in actions:
        acc = v.copy()
        cur = v
        for _ in range(1, d):
            nxt = np.empty_like(cur)
            nxt[local] = w[:, None] * cur if cur.ndim == 2 else w * cur
            cur = nxt
            acc += cur
        v = acc / d
    return v


def ground_space(code, U: float = 1.0, h: float = 1.0, cap: int = DEFAULT_CAP, seed: int = 0) -> GroundSpace:
    """Ground space of H as the joint +1 eigenspace of all generators.

    The Z-type generators are diagonal, so their joint +1 eigenspace is the
    span of the basis states with trivial vertex syndrome; it is computed
    exactly as an index set.  The remaining generators preserve that
    sector and are applied as projectors to seeded random vectors inside
    it.  The rank of the image is the ground-space dimension; the probe
    count doubles until the image is rank deficient.  The basis (embedded
    back in the full space) is verified to satisfy H B = E0 B with E0 the
    term-wise lower bound, which certifies it is the ground space.
    """
    ham = build_hamiltonian(code, U, h, cap)
    size = ham.size
    gens = code.generator_ops
    sector = diagonal_sector(gens, size)
    m = sector.size
    e0 = ham.ground_energy_bound
    if m == 0:
        return GroundSpace(0, e0, np.zeros((size, 0), dtype=np.complex128), 0.0, 0)
    actions = _restricted_actions(gens, sector)
    rng = np.random.default_rng(seed)
    k = min(m, 16)
    while True:
        v = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
        img = _project_restricted(actions, v)
        u, s, _ = np.linalg.svd(img, full_matrices=False)
        r = int((s > 1e-8 * s[0]).sum()) if s[0] > 1e-10 else 0
        if r < k or k >= m:
            break
        k = min(m, 2 * k)
    basis = np.zeros((size, r), dtype=np.complex128)
    basis[sector] = u[:, :r]
    residual = float(np.max(np.abs(ham.apply(basis) - e0 * basis))) if r else 0.0
    return GroundSpace(r, e0, basis, residual, k)


def ground_degeneracy_eigh(code, U: float = 1.0, h: float = 1.0, tol: float = DEGENERACY_TOL) -> tuple[int, float]:
    """Cross-check by full diagonalisation (small systems only)."""
    ham = build_hamiltonian(code, U, h)
    w = np.linalg.eigvalsh(ham.dense())
    return int((np.abs(w - w[0]) < tol).sum()), float(w[0])


def code_projector(code, cap: int = DENSE_MATRIX_CAP) -> np.ndarray:
    """Dense group average pi = |G|^-1 sum_g g, built as the product of generator projectors."""
    size = code.ctx.q**code.n
    check_cap(size, cap)
    return project_code(code.generator_ops, np.eye(size, dtype=np.complex128))


# -- measurement --------------------------------------------------------------


def measure_generator(s: DenseState, g: PauliOp, rng: np.random.Generator) -> tuple[int, DenseState]:
    """Projective measurement of g; outcome j means eigenvalue w^j."""
    g = pad(g, s.n)
    d = g.ctx.d
    if not power(g, d).is_identity():
        raise PauliError("measured operator must satisfy g^d = I")
    probs = np.empty(d)
    branches = []
    for j in range(d):
        b = project_generator(g, s.amps, j)
        branches.append(b)
        probs[j] = np.vdot(b, b).real
    total = probs.sum()
    j = int(rng.choice(d, p=probs / total))
    if probs[j] < 1e-12:
        raise ProtocolError("selected a zero-norm measurement branch")
    return j, DenseState(s.ctx, s.n, branches[j] / np.sqrt(probs[j]))


def outcome_probabilities(s: DenseState, g: PauliOp) -> np.ndarray:
    g = pad(g, s.n)
    return np.array([np.linalg.norm(project_generator(g, s.amps, j)) ** 2 for j in range(g.ctx.d)])


# -- ancilla check Hamiltonians -----------------------------------------------


def _circuit_matrix(size: int, apply) -> np.ndarray:
    """Dense matrix of a linear map given as a function on (N, K) column blocks."""
    return apply(np.eye(size, dtype=np.complex128))


def number_operator_diag(ctx: FieldCtx, n: int, reg: int) -> np.ndarray:
    """Diagonal of the number operator on ``reg`` (values are element indices)."""
    return _digit(np.arange(ctx.q**n), reg, ctx.q).astype(float)


def ancilla_check_hamiltonian(code, kind: str, cell: str, cap: int = DENSE_MATRIX_CAP) -> np.ndarray:
    """Check Hamiltonian on the edges plus one ancilla register (index n).

    Vertex check: conjugate the ancilla number operator by sum gates that add
    incoming edges and subtract outgoing edges.  Face check: the same with
    sum gates weighted by the face orientation, conjugated by Fourier
    transforms on the face edges.  Both are positive semidefinite and vanish
    on |psi>|0> exactly when the generator fixes |psi>.
    """
    g, ctx = code.complex, code.ctx
    if ctx.ell != 1:
        raise ProtocolError("ancilla check Hamiltonians are implemented for prime fields")
    n = g.n + 1
    size = ctx.q**n
    check_cap(size, cap)
    anc = g.n
    if kind == "v":
        coefs = {}
        for j, e in enumerate(g.edges):
            c = (e.head == cell) - (e.tail == cell)
            if c:
                coefs[j] = coefs.get(j, 0) + c
        fourier_regs: list[int] = []
    elif kind == "f":
        coefs = {}
        for eid, s in g.face_by_id[cell].boundary:
            j = g.edge_index[eid]
            coefs[j] = coefs.get(j, 0) + s
        fourier_regs = sorted(coefs)
    else:
        raise ValueError("kind must be 'v' or 'f'")
    perm = np.arange(size, dtype=np.int64)
    for j, c in coefs.items():
        if c % ctx.d:
            perm = sum_gate_target(ctx, n, j, anc, c % ctx.d)[perm]
    # perm maps |x, a> to |x, a + sum c_e x_e>
    f = fourier_matrix(ctx)
    q = ctx.q

    def fourier_all(m, inverse):
        u = f.conj().T if inverse else f
        for r in fourier_regs:
            t = m.reshape(q ** (n - 1 - r), q, q**r, -1)
            m = np.einsum("ab,ibjk->iajk", u, t).reshape(size, -1)
        return m

    def circuit(m):  # W = F U F^dag
        m = fourier_all(m, inverse=True)
        out = np.empty_like(m)
        out[perm] = m
        return fourier_all(out, inverse=False)

    w = _circuit_matrix(size, circuit)
    nd = number_operator_diag(ctx, n, anc)
    return w @ (nd[:, None] * w.conj().T)


# -- Galois symmetry ----------------------------------------------------------


def galois_permutation(ctx: FieldCtx, n: int, power_: int = 1) -> np.ndarray:
    """Target indices of U_kappa^power on n registers (Frobenius on every digit)."""
    idx = np.arange(ctx.q**n, dtype=np.int64)
    out = np.zeros_like(idx)
    frob = np.arange(ctx.q)
    for _ in range(power_):
        frob = ctx.frobenius_table[frob]
    for e in range(n):
        out += frob[_digit(idx, e, ctx.q)] * ctx.q**e
    return out


def galois_symmetry_check(code, U: float = 1.0, h: float = 1.0, cap: int = DEFAULT_CAP, seed: int = 0) -> dict:
    """Commutation of the Galois action with H and its effect on the ground space.

    ``pi_rank`` is the rank of pi_kappa restricted to the ground space, which
    equals the number of Frobenius orbits on H1 with F_{d^ell} coefficients;
    ``fd_fixed_error`` checks that ground states labelled by F_d-valued
    classes are fixed by pi_kappa.
    """
    from itertools import product as iproduct

    from .homology import chain_from_class

    ctx, n = code.ctx, code.n
    ham = build_hamiltonian(code, U, h, cap)
    size = ham.size
    target = galois_permutation(ctx, n)
    uk = sp.csr_matrix((np.ones(size), (target, np.arange(size))), shape=(size, size))
    hm = ham.matrix(cap)
    comm = (uk @ hm - hm @ uk).tocoo()
    comm_norm = float(np.max(np.abs(comm.data))) if comm.nnz else 0.0

    def pi_k(amps):
        acc = np.zeros_like(amps)
        cur = amps
        for _ in range(ctx.ell):
            acc += cur
            nxt = np.empty_like(cur)
            nxt[target] = cur
            cur = nxt
        return acc / ctx.ell

    gs = ground_space(code, U, h, cap, seed)
    img = pi_k(gs.basis)
    sv = np.linalg.svd(img, compute_uv=False)
    pi_rank = int((sv > 1e-8).sum()) if sv.size else 0
    idem = float(np.max(np.abs(pi_k(img) - img))) if img.size else 0.0

    hom = code.homology
    frob = ctx.frobenius_table
    seen, orbits = set(), 0
    for coords in iproduct(range(ctx.q), repeat=hom.rank_h1):
        if coords in seen:
            continue
        orbits += 1
        cur = coords
        while cur not in seen:
            seen.add(cur)
            cur = tuple(int(frob[c]) for c in cur)
    fd_err = 0.0
    gens = code.generator_ops
    for coords in iproduct(range(ctx.d), repeat=hom.rank_h1):
        vec = chain_from_class(code.complex, list(coords), hom).vec
        st = project_code(gens, chain_state(ctx, vec, cap).amps)
        st = st / np.linalg.norm(st)
        fd_err = max(fd_err, float(np.max(np.abs(pi_k(st) - st))))
    return {
        "commutator_max_norm": comm_norm,
        "pi_idempotence_error": idem,
        "ground_dim": gs.dim,
        "pi_rank": pi_rank,
        "frobenius_orbits_on_h1": orbits,
        "fd_states_fixed_error": fd_err,
        "ok": comm_norm < 1e-10 and idem < 1e-10 and pi_rank == orbits and fd_err < 1e-10,
    }
