"""First homology H1 = ker(d1) / im(d2) over the coefficient field."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complex import Chain, TwoComplex
from .linalg import in_row_space, matvec, nullspace, rref, solve


@dataclass(frozen=True, eq=False)
class HomologySummary:
    rank_h1: int
    class_count: int
    basis_cycles: list[Chain]
    complex: TwoComplex = field(repr=False)

    def to_json(self) -> dict:
        return {
            "rank_h1": self.rank_h1,
            "class_count": self.class_count,
            "basis": [{e: int(v) for e, v in c.coeffs.items()} for c in self.basis_cycles],
        }


def boundary_images(g: TwoComplex) -> np.ndarray:
    """Rows spanning im(d2) (one per active face)."""
    return g.boundary2.T.copy()


def h1(g: TwoComplex) -> HomologySummary:
    """Rank of H1 and a basis of cycles independent modulo boundaries.

    The basis is chosen greedily from the reduced-echelon kernel basis of
    d1, keeping each kernel vector that is independent of the boundaries and
    of the vectors already kept.
    """
    ctx = g.ctx
    kernel = nullspace(g.boundary1, ctx)
    span = boundary_images(g)
    chosen = []
    for z in kernel:
        if span.shape[0]:
            r, piv = rref(span, ctx)
            residual, _ = in_row_space(r, piv, z, ctx)
        else:
            residual = z
        if residual.any():
            chosen.append(z)
            span = np.vstack([span, z[None, :]]) if span.size else z[None, :].copy()
    basis = [Chain(g, 1, z) for z in chosen]
    return HomologySummary(len(basis), ctx.q ** len(basis), basis, g)


def is_cycle(c: Chain) -> bool:
    if c.grade != 1:
        raise ValueError("is_cycle expects a grade-1 chain")
    return not matvec(c.complex.boundary1, c.vec, c.complex.ctx).any()


def is_boundary(c: Chain) -> bool:
    g = c.complex
    if g.boundary2.shape[1] == 0:
        return c.is_zero()
    return solve(g.boundary2, c.vec, g.ctx) is not None


def same_class(c1: Chain, c2: Chain) -> bool:
    """True when c1 - c2 is the boundary of an active-face chain."""
    if c1.grade != 1 or c2.grade != 1:
        raise ValueError("same_class expects grade-1 chains")
    return is_boundary(c1 - c2)


def class_coordinates(c: Chain, summary: HomologySummary | None = None) -> tuple[int, ...]:
    """Coordinates of the class of cycle ``c`` in the basis of ``summary`` (field indices)."""
    g = c.complex
    if not is_cycle(c):
        raise ValueError("chain is not a cycle")
    summary = summary or h1(g)
    if summary.rank_h1 == 0:
        return ()
    basis = np.array([b.vec for b in summary.basis_cycles])
    m = np.concatenate([g.boundary2, basis.T], axis=1)
    x = solve(m, c.vec, g.ctx)
    if x is None:  # pragma: no cover - excluded by is_cycle and basis completeness
        raise ArithmeticError("cycle not in span of boundaries and basis")
    return tuple(int(v) for v in x[g.boundary2.shape[1]:])


def chain_from_class(g: TwoComplex, coords: Sequence[int], summary: HomologySummary | None = None) -> Chain:
    summary = summary or h1(g)
    if len(coords) != summary.rank_h1:
        raise ValueError(f"need {summary.rank_h1} coordinates")
    out = Chain.zero(g, 1)
    for k, b in zip(coords, summary.basis_cycles):
        out = out + b.scale(k)
    return out


def cycle_representative(g: TwoComplex, winding: Sequence[int] | int) -> Chain:
    """Short cycle in a chosen class.

    For the square torus builder, ``winding=(i, j)`` gives ``i`` times the
    bottom horizontal loop plus ``j`` times the left vertical loop.  For the
    honeycomb torus the first winding is the bottom row of horizontal edges.
    Otherwise ``winding`` is read as class coordinates over the ``h1`` basis
    (an integer is expanded to base-q digits).
    """
    ctx = g.ctx
    builder = g.meta.get("builder") if g.meta else None
    if isinstance(winding, (int, np.integer)):
        summary = h1(g)
        k, coords = int(winding), []
        for _ in range(summary.rank_h1):
            coords.append(k % ctx.q)
            k //= ctx.q
        return chain_from_class(g, coords, summary)
    winding = [int(ctx.element(w)) for w in winding]
    if builder == "torus_square":
        m = g.meta["m"]
        coeffs: dict[str, int] = {}
        i, j = winding
        for x in range(m):
            if i:
                coeffs[f"h{x}"] = i
            if j:
                coeffs[f"u{x * m}"] = j
        return Chain.from_dict(g, 1, coeffs)
    if builder == "honeycomb_torus" and winding[1] == 0:
        cols = g.meta["cols"]
        return Chain.from_dict(g, 1, {f"h{x},0": winding[0] for x in range(2 * cols)} if winding[0] else {})
    return chain_from_class(g, winding)
