"""Left-invariant vector fields as polynomial first-order operators.

A field ``sum_i a_i(x) d_i`` is stored as its component polynomials.  The
realization of an algebra vector v is the t-linear part of ``x . exp(t v)``
computed symbolically, so every field is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .algebra import AlgVector, StratifiedAlgebra
from .group import GroupPoint, bch_product, exp_point
from .polynomial import Polynomial, as_fraction


@dataclass(frozen=True)
class PolyVectorField:
    algebra: StratifiedAlgebra
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        if len(self.components) != self.algebra.dim:
            raise ValueError("field needs one component per coordinate")

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(self.algebra, tuple(p + q for p, q in zip(self.components, other.components)))

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(self.algebra, tuple(p - q for p, q in zip(self.components, other.components)))

    def __mul__(self, c) -> "PolyVectorField":
        return PolyVectorField(self.algebra, tuple(p * c for p in self.components))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def to_string(self) -> str:
        parts = []
        for i, p in enumerate(self.components):
            if p.is_zero():
                continue
            d = f"d{i + 1}"
            if len(p) == 1:
                text = p.to_string()
                sign = "-" if text.startswith("-") else "+"
                body = text.lstrip("-")
                parts.append((sign, d if body == "1" else f"{body}*{d}"))
            else:
                parts.append(("+", f"({p})*{d}"))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return out + "".join(f" {sg} {body}" for sg, body in parts[1:])

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class SublevelSet:
    """E = {P <= 0} in the chart coordinates of ``algebra``."""

    algebra: StratifiedAlgebra
    P: Polynomial
    label: str = ""

    def __post_init__(self):
        if self.P.nvars != self.algebra.dim:
            raise ValueError("defining polynomial must use one variable per coordinate")
        if self.P.is_zero():
            raise ValueError("defining polynomial must not be identically zero")


@lru_cache(maxsize=256)
def _basis_field(a: StratifiedAlgebra, j: int) -> tuple[Polynomial, ...]:
    n = a.dim
    t = Polynomial.variable(n, n + 1)
    x = GroupPoint(a, tuple(Polynomial.variable(i, n + 1) for i in range(n)))
    step = exp_point(a, a.basis(j) * t)
    prod = bch_product(a, x, step)
    return tuple(c.coefficient_in(n, 1).truncate_vars(n) for c in prod.coords)


def realize_left_invariant(a: StratifiedAlgebra, v: AlgVector) -> PolyVectorField:
    """The left-invariant field d/dt|0 of x . exp(t v), in chart coordinates."""
    n = a.dim
    comps = [Polynomial.zero(n) for _ in range(n)]
    for j, c in enumerate(v.coeffs):
        if c != 0:
            for i, p in enumerate(_basis_field(a, j)):
                comps[i] = comps[i] + p * c
    return PolyVectorField(a, tuple(comps))


def apply_field(V: PolyVectorField, P: Polynomial) -> Polynomial:
    """V P = sum_i a_i d_i P."""
    if P.nvars != len(V.components):
        raise ValueError("field and polynomial disagree on the number of variables")
    total = Polynomial.zero(P.nvars)
    for i, a in enumerate(V.components):
        if not a.is_zero():
            d = P.diff(i)
            if not d.is_zero():
                total = total + a * d
    return total


def field_bracket(V: PolyVectorField, W: PolyVectorField) -> PolyVectorField:
    """Commutator VW - WV of first-order operators."""
    comps = tuple(apply_field(V, w) - apply_field(W, v) for v, w in zip(V.components, W.components))
    return PolyVectorField(V.algebra, comps)


def divergence(V: PolyVectorField) -> Polynomial:
    """Divergence for Lebesgue measure in chart coordinates."""
    n = len(V.components)
    total = Polynomial.zero(n)
    for i, a in enumerate(V.components):
        total = total + a.diff(i)
    return total


def euclidean_gradient(P: Polynomial) -> list[Polynomial]:
    return P.gradient()


def substitute(P: Polynomial, args: Sequence) -> Polynomial:
    return P.substitute(args)


def horizontal_derivatives(E: SublevelSet) -> list[Polynomial]:
    """(X_1 P, ..., X_m P)."""
    a = E.algebra
    return [apply_field(realize_left_invariant(a, a.basis(i)), E.P) for i in a.layer_indices(1)]


# -- named sets ---------------------------------------------------------

def cone(a: StratifiedAlgebra, alpha=Fraction(1, 2)) -> SublevelSet:
    """Engel cone {alpha x2^3 + 2 x4 <= 0}."""
    _need_dim(a, 4, "cone")
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise ValueError("cone parameter alpha must be positive")
    x = Polynomial.variables(4)
    return SublevelSet(a, alpha * x[1] ** 3 + 2 * x[3], f"cone:{alpha}")


def pab(a: StratifiedAlgebra, a_coef, b_coef) -> SublevelSet:
    """Engel family {2a x4 - b x3 + x2 <= 0}."""
    _need_dim(a, 4, "pab")
    a_coef, b_coef = as_fraction(a_coef), as_fraction(b_coef)
    x = Polynomial.variables(4)
    return SublevelSet(a, 2 * a_coef * x[3] - b_coef * x[2] + x[1], f"pab:{a_coef},{b_coef}")


def rloca(a: StratifiedAlgebra, level=0) -> SublevelSet:
    """Heisenberg sets {x3 + 2 x1 x2 <= level}."""
    _need_dim(a, 3, "rloca")
    x = Polynomial.variables(3)
    return SublevelSet(a, x[2] + 2 * x[0] * x[1] - as_fraction(level), "rloca")


def halfspace(a: StratifiedAlgebra, c, nu: Sequence) -> SublevelSet:
    """{sum_i nu_i x_i <= c} over the horizontal coordinates."""
    idx = a.layer_indices(1)
    if len(nu) != len(idx):
        raise ValueError(f"halfspace normal needs {len(idx)} entries")
    nu = [as_fraction(v) for v in nu]
    if not any(nu):
        raise ValueError("halfspace normal must be nonzero")
    x = Polynomial.variables(a.dim)
    P = Polynomial.constant(-as_fraction(c), a.dim)
    for i, v in zip(idx, nu):
        P = P + v * x[i]
    return SublevelSet(a, P, "halfspace")


def _need_dim(a: StratifiedAlgebra, n: int, what: str):
    if a.dim != n:
        raise ValueError(f"{what} is defined on a {n}-dimensional group, got dimension {a.dim}")


def parse_set(a: StratifiedAlgebra, text: str) -> SublevelSet:
    """``cone:1/2``, ``pab:1,0``, ``halfspace:c,nu1,..,num``, ``rloca``, ``poly:<P>``."""
    kind, _, args = text.partition(":")
    kind = kind.strip().lower()
    vals = [s for s in args.split(",") if s.strip()] if kind != "poly" else []
    if kind == "cone":
        return cone(a, vals[0] if vals else Fraction(1, 2))
    if kind == "pab":
        if len(vals) != 2:
            raise ValueError("pab needs two parameters a,b")
        return pab(a, vals[0], vals[1])
    if kind == "halfspace":
        if len(vals) < 2:
            raise ValueError("halfspace needs c followed by the normal")
        return halfspace(a, vals[0], vals[1:])
    if kind == "rloca":
        return rloca(a, vals[0] if vals else 0)
    if kind == "poly":
        return SublevelSet(a, Polynomial.parse(args, a.dim), "poly")
    raise ValueError(f"unknown set {text!r}")
