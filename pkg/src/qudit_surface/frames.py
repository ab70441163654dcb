"""Exact states of the form sum_i c_i P_i |vacuum> for a nondegenerate code.

When the stabilizer group fixes a unique vacuum (e.g. a disk without
punctures), every Pauli excitation ``P|vacuum>`` is a joint eigenstate of
all generators, and overlaps reduce to Pauli algebra:
``<vac|P|vac>`` is ``w^c`` when ``P = w^c g`` for a stabilizer ``g`` and 0
when ``P`` violates some generator.  This lets the protocols run on
lattices far beyond dense reach.  ``DenseLattice`` exposes the same
interface on top of explicit amplitudes, so both engines can run the same
protocol code and be cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ProtocolError
from .gfarith import FieldCtx
from .linalg import rref
from .pauli import PauliOp, _prime_expansion, commutation_phase, multiply, power, symplectic_vector
from .statevec import apply_pauli_array, ground_space, pad, phases, project_generator

Condition = tuple[PauliOp, int]  # (generator, eigenvalue exponent j)


@dataclass(eq=False)
class Vacuum:
    """Pauli-algebra oracle for the unique ground state of a code."""

    code: object

    def __post_init__(self):
        if self.code.code_dim != 1:
            raise ProtocolError(f"vacuum is degenerate (code dimension {self.code.code_dim})")

    @cached_property
    def _system(self):
        ctx = self.code.ctx
        gens = self.code.generator_ops
        prime = FieldCtx(ctx.d)
        m = _prime_expansion(ctx, np.array([symplectic_vector(g) for g in gens]))
        # row-reduce [M^T | I] style: solve sum_i k_i v_i = target
        aug = np.concatenate([m.T, np.eye(m.shape[1], dtype=np.int64)], axis=1)
        return prime, m, aug

    def syndrome(self, p: PauliOp) -> list[int]:
        return [commutation_phase(g, p) for g in self.code.generator_ops]

    def expectation(self, p: PauliOp) -> complex:
        """<vac| p |vac>, computed exactly."""
        gens = self.code.generator_ops
        if any(commutation_phase(g, p) for g in gens):
            return 0.0
        prime, m, _ = self._system
        target = _prime_expansion(p.ctx, symplectic_vector(p)[None, :])[0]
        from .linalg import solve

        sol = solve(m.T, target, prime)
        if sol is None:  # pragma: no cover - nondegenerate code: centralizer = group
            raise ProtocolError("operator commutes with the code but is not a stabilizer")
        acc = PauliOp.identity(p.ctx, p.n)
        for k, g in zip(sol, gens):
            if k:
                acc = multiply(acc, power(g, int(k)))
        phase = (p.phase - acc.phase) % p.ctx.d
        return complex(phases(p.ctx.d)[phase])


@dataclass(eq=False)
class PauliSumState:
    vacuum: Vacuum
    terms: list[tuple[complex, PauliOp]] = field(default_factory=list)

    @classmethod
    def ground(cls, code) -> "PauliSumState":
        vac = Vacuum(code)
        return cls(vac, [(1.0 + 0j, PauliOp.identity(code.ctx, code.n))])

    def apply(self, p: PauliOp) -> "PauliSumState":
        return PauliSumState(self.vacuum, [(c, multiply(p, q)) for c, q in self.terms])

    def scale(self, k: complex) -> "PauliSumState":
        return PauliSumState(self.vacuum, [(k * c, q) for c, q in self.terms])

    def add(self, other: "PauliSumState") -> "PauliSumState":
        return PauliSumState(self.vacuum, self.terms + other.terms)

    def project(self, conditions: Sequence[Condition]) -> "PauliSumState":
        """Keep the components whose generator eigenvalues match ``conditions``."""
        keep = [
            (c, q) for c, q in self.terms
            if all(commutation_phase(g, q) == j % q.ctx.d for g, j in conditions)
        ]
        return PauliSumState(self.vacuum, keep)

    def inner(self, other: "PauliSumState") -> complex:
        acc = 0j
        for c1, p1 in self.terms:
            dag = p1.dagger()
            for c2, p2 in other.terms:
                acc += np.conj(c1) * c2 * self.vacuum.expectation(multiply(dag, p2))
        return complex(acc)

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))

    def simplify(self) -> "PauliSumState":
        """Merge terms whose operators agree on the vacuum up to a phase."""
        merged: list[tuple[complex, PauliOp]] = []
        for c, p in self.terms:
            for i, (c0, p0) in enumerate(merged):
                ov = self.vacuum.expectation(multiply(p0.dagger(), p))
                if abs(ov) > 0.5:
                    merged[i] = (c0 + c * ov, p0)
                    break
            else:
                merged.append((c, p))
        return PauliSumState(self.vacuum, [(c, p) for c, p in merged if abs(c) > 1e-15])


@dataclass(eq=False)
class DenseLattice:
    """Same interface as PauliSumState, backed by an explicit amplitude vector."""

    code: object
    amps: np.ndarray

    @classmethod
    def ground(cls, code, seed: int = 0) -> "DenseLattice":
        gs = ground_space(code, seed=seed)
        if gs.dim != 1:
            raise ProtocolError(f"vacuum is degenerate (dimension {gs.dim})")
        v = gs.basis[:, 0]
        # fix the global phase so the largest amplitude is real positive
        k = int(np.argmax(np.abs(v)))
        return cls(code, v * np.exp(-1j * np.angle(v[k])))

    def apply(self, p: PauliOp) -> "DenseLattice":
        return DenseLattice(self.code, apply_pauli_array(pad(p, self.code.n), self.amps))

    def scale(self, k: complex) -> "DenseLattice":
        return DenseLattice(self.code, k * self.amps)

    def add(self, other: "DenseLattice") -> "DenseLattice":
        return DenseLattice(self.code, self.amps + other.amps)

    def project(self, conditions: Sequence[Condition]) -> "DenseLattice":
        v = self.amps
        for g, j in conditions:
            v = project_generator(g, v, j % g.ctx.d)
        return DenseLattice(self.code, v)

    def inner(self, other: "DenseLattice") -> complex:
        return complex(np.vdot(self.amps, other.amps))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def simplify(self) -> "DenseLattice":
        return self


def conditional_unitary(state, s_op: PauliOp, on_b: Sequence[Condition], on_a: Sequence[Condition],
                        phase_b: complex = 1.0):
    """Apply ``phase_b S P_B + S^-1 P_A + (1 - P_A - P_B)`` for orthogonal syndrome projectors.

    ``S`` maps the P_B sector onto the P_A sector, so the map is unitary.
    """
    pb = state.project(on_b)
    pa = state.project(on_a)
    rest = state.add(pb.scale(-1)).add(pa.scale(-1))
    return pb.apply(s_op).scale(phase_b).add(pa.apply(s_op.dagger())).add(rest).simplify()
