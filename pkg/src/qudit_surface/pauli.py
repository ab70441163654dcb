"""Generalized Pauli tensors over F_d and F_{d^ell}.

Every operator is kept in the canonical form ``w^c X(a) Z(b)`` with the X
factor to the left of the Z factor on each qudit, where ``w = exp(2 pi i/d)``.
On a basis state, ``X(a) Z(b) |x> = w^{tr(b.x)} |x + a>``.  Reordering uses
``Z(b) X(a) = w^{tr(a b)} X(a) Z(b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InconsistentStabilizerError, NonCommutingError, PauliError
from .gfarith import FieldCtx, FieldElement
from .linalg import nullspace, rank


@dataclass(frozen=True, eq=False)
class PauliOp:
    ctx: FieldCtx
    phase: int
    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64).copy()
        z = np.asarray(self.z, dtype=np.int64).copy()
        if x.shape != z.shape or x.ndim != 1:
            raise PauliError("x and z vectors must have equal length")
        if ((x < 0) | (x >= self.ctx.q) | (z < 0) | (z >= self.ctx.q)).any():
            raise PauliError("exponent outside the field")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", int(self.phase) % self.ctx.d)

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int) -> "PauliOp":
        return cls(ctx, 0, np.zeros(n, np.int64), np.zeros(n, np.int64))

    @classmethod
    def from_dicts(
        cls,
        ctx: FieldCtx,
        n: int,
        x: Mapping[int, int | FieldElement] | None = None,
        z: Mapping[int, int | FieldElement] | None = None,
        phase: int = 0,
    ) -> "PauliOp":
        """Build ``w^phase X(x) Z(z)``; integer values are prime-field scalars."""
        xv = np.zeros(n, np.int64)
        zv = np.zeros(n, np.int64)
        for e, a in (x or {}).items():
            xv[e] = ctx.add_table[xv[e], int(ctx.element(a))]
        for e, b in (z or {}).items():
            zv[e] = ctx.add_table[zv[e], int(ctx.element(b))]
        return cls(ctx, phase, xv, zv)

    @classmethod
    def single(cls, ctx: FieldCtx, n: int, edge: int, a=0, b=0) -> "PauliOp":
        """``X_e(a) Z_e(b)`` on a single qudit."""
        return cls.from_dicts(ctx, n, {edge: a}, {edge: b})

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def phase_exp(self):
        from .gfarith import PhaseExp

        return PhaseExp(self.phase, self.ctx.d)

    def is_identity(self) -> bool:
        return not self.x.any() and not self.z.any() and self.phase == 0

    def is_scalar(self) -> bool:
        return not self.x.any() and not self.z.any()

    def support(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.x | self.z)[0]]

    # -- algebra ------------------------------------------------------------

    def _check(self, other: "PauliOp"):
        if other.ctx != self.ctx:
            raise PauliError("operators over different fields")
        if other.n != self.n:
            raise PauliError(f"operators act on {self.n} and {other.n} qudits")

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)

    def __pow__(self, k: int) -> "PauliOp":
        return power(self, k)

    def scale_phase(self, k: int) -> "PauliOp":
        return PauliOp(self.ctx, self.phase + k, self.x, self.z)

    def inverse(self) -> "PauliOp":
        return inverse(self)

    def dagger(self) -> "PauliOp":
        """Adjoint; equal to the inverse because the operator is unitary."""
        return inverse(self)

    def __eq__(self, other):
        if not isinstance(other, PauliOp):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.ctx, self.phase, self.x.tobytes(), self.z.tobytes()))

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"PauliOp({render(self)})"

    def to_json(self) -> dict:
        return {
            "phase": self.phase,
            "x": {str(i): int(v) for i, v in enumerate(self.x) if v},
            "z": {str(i): int(v) for i, v in enumerate(self.z) if v},
            "text": render(self),
        }


def _label(ctx: FieldCtx, idx: int) -> str:
    return repr(FieldElement(ctx, int(idx))).replace(" ", "")


def render(p: PauliOp) -> str:
    """Text form such as ``w^2 X2(1) Z2(2) X5(1)``; the identity renders as ``I``."""
    parts = []
    if p.phase:
        parts.append("w" if p.phase == 1 else f"w^{p.phase}")
    for e in range(p.n):
        if p.x[e]:
            parts.append(f"X{e}({_label(p.ctx, p.x[e])})")
        if p.z[e]:
            parts.append(f"Z{e}({_label(p.ctx, p.z[e])})")
    if not p.x.any() and not p.z.any():
        parts.append("I")
    return " ".join(parts)


def multiply(p: PauliOp, q: PauliOp) -> PauliOp:
    """Canonical product ``p q``."""
    p._check(q)
    ctx = p.ctx
    phase = p.phase + q.phase + ctx.dot_trace(p.z, q.x)
    return PauliOp(ctx, phase, ctx.add_table[p.x, q.x], ctx.add_table[p.z, q.z])


def commutation_phase(p: PauliOp, q: PauliOp) -> int:
    """Residue t with ``p q = w^t q p``."""
    p._check(q)
    ctx = p.ctx
    return (ctx.dot_trace(p.z, q.x) - ctx.dot_trace(q.z, p.x)) % ctx.d


symplectic_form = commutation_phase


def inverse(p: PauliOp) -> PauliOp:
    ctx = p.ctx
    return PauliOp(ctx, -p.phase + ctx.dot_trace(p.x, p.z), ctx.neg_table[p.x], ctx.neg_table[p.z])


def power(p: PauliOp, k: int) -> PauliOp:
    if k < 0:
        return power(inverse(p), -k)
    out = PauliOp.identity(p.ctx, p.n)
    base = p
    while k:
        if k & 1:
            out = multiply(out, base)
        base = multiply(base, base)
        k >>= 1
    return out


def product(ops: Sequence[PauliOp], ctx: FieldCtx | None = None, n: int | None = None) -> PauliOp:
    ops = list(ops)
    if not ops:
        if ctx is None or n is None:
            raise PauliError("empty product needs ctx and n")
        return PauliOp.identity(ctx, n)
    out = ops[0]
    for o in ops[1:]:
        out = multiply(out, o)
    return out


def symplectic_vector(p: PauliOp) -> np.ndarray:
    """(x | z) over the field, as field indices."""
    return np.concatenate([p.x, p.z])


def _prime_expansion(ctx: FieldCtx, rows: np.ndarray) -> np.ndarray:
    """Replace each field entry by its ell coordinates over F_d."""
    if rows.size == 0:
        return rows.reshape(rows.shape[0], rows.shape[1] * ctx.ell) if rows.ndim == 2 else rows
    return ctx.coeffs[rows].reshape(rows.shape[0], -1)


@dataclass(frozen=True)
class SymplecticRank:
    rank: int
    prime_rank: int
    group_order: int
    code_dim: int
    n: int


def check_commuting(gens: Sequence[PauliOp], names: Sequence[str] | None = None) -> None:
    """Raise NonCommutingError on the first non-commuting pair."""
    names = list(names) if names is not None else [str(i) for i in range(len(gens))]
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            t = commutation_phase(gens[i], gens[j])
            if t:
                raise NonCommutingError(
                    f"generators {names[i]} and {names[j]} do not commute (phase exponent {t})"
                )


def symplectic_rank(
    gens: Sequence[PauliOp],
    ctx: FieldCtx | None = None,
    n: int | None = None,
    names: Sequence[str] | None = None,
) -> SymplecticRank:
    """Rank and order of the group generated by commuting Pauli operators.

    ``rank`` is the rank of the (x|z) matrix over the coefficient field.
    ``group_order`` counts the group generated over F_d, i.e. d to the
    F_d-rank of the expanded vectors, and ``code_dim`` is the dimension of
    the joint fixed space, (d^ell)^n / group_order.
    """
    gens = list(gens)
    if gens:
        ctx, n = gens[0].ctx, gens[0].n
    if ctx is None or n is None:
        raise PauliError("empty generator list needs ctx and n")
    check_commuting(gens, names)
    if not gens:
        return SymplecticRank(0, 0, 1, ctx.q ** n, n)
    m = np.array([symplectic_vector(g) for g in gens])
    r = rank(m, ctx)
    prime = FieldCtx(ctx.d)
    expanded = _prime_expansion(ctx, m)
    rd = rank(expanded, prime)
    # every F_d relation among the generators must multiply to the identity
    for rel in nullspace(expanded.T, prime):
        acc = PauliOp.identity(ctx, n)
        for k, g in zip(rel, gens):
            if k:
                acc = multiply(acc, power(g, int(k)))
        if not acc.is_scalar():  # pragma: no cover - guaranteed by the relation
            raise PauliError("relation did not cancel")
        if acc.phase:
            raise InconsistentStabilizerError(
                f"inconsistent stabilizer: w^{acc.phase} I lies in the generated group"
            )
    return SymplecticRank(r, rd, ctx.d ** rd, ctx.d ** (ctx.ell * n - rd), n)
