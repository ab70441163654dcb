"""Exact arithmetic in F_d and F_{d^l}.

Field elements are encoded as integers ``0 <= i < d**ell`` whose base-d
digits (least significant first) are the coordinates in the power basis
``1, alpha, ..., alpha**(ell-1)``.  All heavy lifting is done through
lookup tables built once per :class:`FieldCtx`.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import FieldError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n**0.5) + 1))


# -- polynomials over F_d, coefficient lists low degree first ---------------

def _poly_trim(p: list[int]) -> list[int]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_mod(a: Sequence[int], b: Sequence[int], d: int) -> list[int]:
    """Remainder of a / b over F_d (b must have a nonzero leading coefficient)."""
    a = [c % d for c in a]
    b = _poly_trim([c % d for c in b])
    inv_lead = pow(b[-1], d - 2, d)
    while True:
        _poly_trim(a)
        if len(a) < len(b) or not any(a):
            return a
        shift = len(a) - len(b)
        coef = a[-1] * inv_lead % d
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * c) % d


def is_irreducible(modulus: Sequence[int], d: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _poly_trim(list(modulus))
    deg = len(poly) - 1
    if deg < 1:
        return False
    for k in range(1, deg // 2 + 1):
        for low in itertools.product(range(d), repeat=k):
            divisor = list(low) + [1]
            if not any(_poly_mod(poly, divisor, d)):
                return False
    return True


def default_modulus(d: int, ell: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree ell, scanning low coefficients as base-d digits."""
    if ell == 1:
        return (0, 1)
    for k in range(d**ell):
        low = [(k // d**j) % d for j in range(ell)]
        cand = tuple(low + [1])
        if is_irreducible(cand, d):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {ell} over F_{d}")  # pragma: no cover


@dataclass(frozen=True)
class FieldCtx:
    """The field F_{d^ell} = F_d[x]/(modulus)."""

    d: int
    ell: int = 1
    modulus: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not is_prime(self.d):
            raise FieldError(f"characteristic d={self.d} is not prime")
        if self.ell < 1:
            raise FieldError("extension degree must be >= 1")
        if not self.modulus:
            object.__setattr__(self, "modulus", default_modulus(self.d, self.ell))
        mod = tuple(int(c) % self.d for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) != self.ell + 1 or mod[-1] != 1:
            raise FieldError(f"modulus {mod} must be monic of degree {self.ell}")
        if self.ell > 1 and not is_irreducible(mod, self.d):
            raise FieldError(f"modulus {mod} is reducible over F_{self.d}")

    @property
    def q(self) -> int:
        """Number of field elements."""
        return self.d**self.ell

    # -- tables -------------------------------------------------------------

    @cached_property
    def coeffs(self) -> np.ndarray:
        """(q, ell) coordinate vectors of every element."""
        idx = np.arange(self.q)
        return np.stack([(idx // self.d**j) % self.d for j in range(self.ell)], axis=1)

    @cached_property
    def _weights(self) -> np.ndarray:
        return self.d ** np.arange(self.ell)

    def encode(self, coeffs) -> np.ndarray | int:
        c = np.asarray(coeffs) % self.d
        out = c @ self._weights
        return int(out) if np.ndim(out) == 0 else out

    @cached_property
    def alpha_matrix(self) -> np.ndarray:
        """Matrix of multiplication by alpha acting on coordinate columns."""
        d, ell = self.d, self.ell
        m = np.zeros((ell, ell), dtype=np.int64)
        for j in range(ell - 1):
            m[j + 1, j] = 1
        # alpha * alpha^(ell-1) = -sum a_k alpha^k
        for k in range(ell):
            m[k, ell - 1] = (-self.modulus[k]) % d
        return m

    @cached_property
    def _alpha_powers_of_all(self) -> np.ndarray:
        """(ell, q, ell): coordinates of alpha^j * x for every x."""
        out = np.empty((self.ell, self.q, self.ell), dtype=np.int64)
        cur = self.coeffs.copy()
        for j in range(self.ell):
            out[j] = cur
            cur = (cur @ self.alpha_matrix.T) % self.d
        return out

    @cached_property
    def add_table(self) -> np.ndarray:
        c = self.coeffs
        s = (c[:, None, :] + c[None, :, :]) % self.d
        return s @ self._weights

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self.encode((-self.coeffs) % self.d)

    @cached_property
    def mul_table(self) -> np.ndarray:
        # x * y = sum_j y_j (alpha^j x)
        prod = np.einsum("yj,jxk->xyk", self.coeffs, self._alpha_powers_of_all) % self.d
        return prod @ self._weights

    @cached_property
    def inv_table(self) -> np.ndarray:
        inv = np.zeros(self.q, dtype=np.int64)
        rows, cols = np.nonzero(self.mul_table == 1)
        inv[rows] = cols
        return inv

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Trace of multiplication-by-x, for every x."""
        ap = self._alpha_powers_of_all
        return sum(ap[j, :, j] for j in range(self.ell)) % self.d

    @cached_property
    def frobenius_table(self) -> np.ndarray:
        out = np.arange(self.q)
        result = np.ones(self.q, dtype=np.int64)
        for _ in range(self.d):
            result = self.mul_table[result, out]
        return result

    # -- convenience --------------------------------------------------------

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (list, tuple, np.ndarray)):
            return FieldElement(self, self.encode(value))
        return FieldElement(self, self.from_int(int(value)))

    def from_int(self, k: int) -> int:
        """Index of the prime-field scalar k (k mod d) inside F_{d^ell}."""
        return int(k) % self.d

    @property
    def alpha(self) -> "FieldElement":
        return FieldElement(self, 0 if self.ell == 1 else self.d)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.q)]

    def dot_trace(self, a: np.ndarray, b: np.ndarray) -> int:
        """Trace of sum_i a_i b_i, as a residue mod d."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return int(self.trace_table[self.mul_table[a, b]].sum() % self.d)

    @cached_property
    def normal_basis_generator(self) -> int:
        """Smallest beta whose Frobenius orbit is an F_d-basis."""
        from .linalg import rank

        prime = FieldCtx(self.d)
        for beta in range(1, self.q):
            orbit = [beta]
            for _ in range(self.ell - 1):
                orbit.append(int(self.frobenius_table[orbit[-1]]))
            if rank(self.coeffs[orbit], prime) == self.ell:
                return beta
        raise FieldError("no normal basis found")  # pragma: no cover

    def normal_basis(self) -> list[int]:
        """Frobenius orbit {beta, beta^d, ...}; equals [1] for prime fields."""
        if self.ell == 1:
            return [1]
        out = [self.normal_basis_generator]
        for _ in range(self.ell - 1):
            out.append(int(self.frobenius_table[out[-1]]))
        return out

    def to_json(self) -> dict:
        return {"d": self.d, "ell": self.ell, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldCtx":
        return cls(int(obj["d"]), int(obj.get("ell", 1)), tuple(obj.get("modulus", ())))

    def __repr__(self):
        if self.ell == 1:
            return f"FieldCtx(F_{self.d})"
        return f"FieldCtx(F_{self.d}^{self.ell}, modulus={list(self.modulus)})"


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldCtx
    index: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.ctx.coeffs[self.index])

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise FieldError("mixing elements of different fields")
            return other.index
        return self.ctx.from_int(other)

    def __add__(self, other):
        return FieldElement(self.ctx, int(self.ctx.add_table[self.index, self._coerce(other)]))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.ctx, int(self.ctx.neg_table[self.index]))

    def __sub__(self, other):
        return self + (-FieldElement(self.ctx, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.ctx, self._coerce(other)) - self

    def __mul__(self, other):
        return FieldElement(self.ctx, int(self.ctx.mul_table[self.index, self._coerce(other)]))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.index == 0:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElement(self.ctx, int(self.ctx.inv_table[self.index]))

    def __truediv__(self, other):
        return self * FieldElement(self.ctx, self._coerce(other)).inverse()

    def __pow__(self, k: int):
        out = FieldElement(self.ctx, 1)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __bool__(self):
        return self.index != 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.ctx == other.ctx and self.index == other.index
        if isinstance(other, int):
            return self.index == self.ctx.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.index))

    def __int__(self):
        return self.index

    def __repr__(self):
        if self.ctx.ell == 1:
            return f"{self.index}"
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                mono = "1" if j == 0 else ("a" if j == 1 else f"a^{j}")
                terms.append(mono if c == 1 and j else f"{c}" if j == 0 else f"{c}{mono}")
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class PhaseExp:
    """The root of unity xi**exponent with xi = exp(2 pi i / d)."""

    exponent: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", int(self.exponent) % self.d)

    def __add__(self, other: "PhaseExp | int") -> "PhaseExp":
        k = other.exponent if isinstance(other, PhaseExp) else int(other)
        return PhaseExp(self.exponent + k, self.d)

    def __neg__(self):
        return PhaseExp(-self.exponent, self.d)

    def __complex__(self):
        return cmath.exp(2j * cmath.pi * self.exponent / self.d)

    def to_complex(self) -> complex:
        return complex(self)


def xi(d: int) -> complex:
    return cmath.exp(2j * cmath.pi / d)


def trace(ctx: FieldCtx, x: FieldElement | int) -> int:
    """Field trace down to F_d, via the multiplication-map matrix."""
    return int(ctx.trace_table[int(x)])


def trace_by_orbit(ctx: FieldCtx, x: FieldElement | int) -> int:
    """Same value as :func:`trace`, summed over the Frobenius orbit instead."""
    cur = int(x)
    acc = 0
    for _ in range(ctx.ell):
        acc = int(ctx.add_table[acc, cur])
        cur = int(ctx.frobenius_table[cur])
    if acc >= ctx.d:
        raise FieldError("orbit sum left the prime field")  # pragma: no cover
    return acc


def frobenius(ctx: FieldCtx, x: FieldElement | int) -> FieldElement:
    return FieldElement(ctx, int(ctx.frobenius_table[int(x)]))


def character_sum(ctx: FieldCtx) -> complex:
    """sum over b of xi**trace(b); vanishes for every finite field."""
    w = np.exp(2j * np.pi * ctx.trace_table / ctx.d)
    return complex(w.sum())


def discriminant_matrix(ctx: FieldCtx) -> np.ndarray:
    alpha_pow = [1]
    for _ in range(2 * ctx.ell - 2):
        alpha_pow.append(int(ctx.mul_table[alpha_pow[-1], ctx.alpha.index]))
    return np.array(
        [[ctx.trace_table[alpha_pow[j + k]] for k in range(ctx.ell)] for j in range(ctx.ell)],
        dtype=np.int64,
    )


def discriminant_nonzero(ctx: FieldCtx) -> bool:
    from .linalg import rank

    return rank(discriminant_matrix(ctx), FieldCtx(ctx.d)) == ctx.ell
