"""Translate-dilate pullbacks of polynomial sublevel sets and their
leading-order tangents.

The rescaled set delta_{1/r}(x^-1 E) is {y : P(x . delta_r y) <= 0}; as a
polynomial in r this is sum_d r^d Q_d(y), and the lowest nonzero Q_d is the
tangent set at x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import AlgVector, StratifiedAlgebra
from .fields import SublevelSet, apply_field, realize_left_invariant
from .group import GroupPoint, bch_product
from .measure import ball_box, surface_measure
from .polynomial import Polynomial, as_fraction
from .span import HalfspaceSpec


class BlowupError(ValueError):
    pass


class NotOnBoundary(BlowupError):
    pass


class HorizontalComponent(BlowupError):
    pass


@dataclass(frozen=True)
class PullbackFamily:
    E: SublevelSet
    x: GroupPoint
    P: Polynomial  # in y_1..y_n, r (r is the last variable)
    expansion: dict[int, Polynomial]

    def at(self, r) -> Polynomial:
        """Specialize the scale to a number (no normalization)."""
        n = self.E.algebra.dim
        args = Polynomial.variables(n) + [Polynomial.constant(as_fraction(r), n)]
        return self.P.substitute(args, n)

    def to_dict(self) -> dict:
        return {str(d): q.to_string([f"y{i + 1}" for i in range(q.nvars)]) for d, q in sorted(self.expansion.items())}


def _pullback_symbolic(E: SublevelSet, x: GroupPoint) -> Polynomial:
    a = E.algebra
    n = a.dim
    r = Polynomial.variable(n, n + 1)
    y = GroupPoint(a, tuple(Polynomial.variable(i, n + 1) * r ** w for i, w in enumerate(a.weights)))
    xs = GroupPoint(a, tuple(Polynomial.constant(c, n + 1) for c in x.coords))
    moved = bch_product(a, xs, y)
    return E.P.substitute(list(moved.coords), n + 1)


def normalize(P: Polynomial) -> Polynomial:
    """Divide by the absolute value of the largest coefficient (keeps {P <= 0})."""
    m = P.max_abs_coefficient()
    return P if m == 0 else P / m


def translate_dilate_pullback(E: SublevelSet, x: GroupPoint, r=None):
    """Symbolic family when r is None, otherwise the concrete normalized set."""
    a = E.algebra
    if x.algebra != a:
        raise BlowupError("base point belongs to a different group")
    for c in x.coords:
        as_fraction(c)
    Pt = _pullback_symbolic(E, x)
    n = a.dim
    expansion = {}
    for d in range(Pt.degree_in(n) + 1):
        q = Pt.coefficient_in(n, d).truncate_vars(n)
        if not q.is_zero():
            expansion[d] = q
    fam = PullbackFamily(E, x, Pt, expansion)
    if r is None:
        return fam
    r = as_fraction(r)
    if r <= 0:
        raise BlowupError("scale must be positive")
    return SublevelSet(a, normalize(fam.at(r)), f"pullback({E.label})")


@dataclass(frozen=True)
class TangentLimit:
    order: int
    leading: Polynomial
    classification: str
    halfspace: HalfspaceSpec | None
    family: PullbackFamily

    def to_dict(self) -> dict:
        names = [f"y{i + 1}" for i in range(self.leading.nvars)]
        return {
            "order": self.order,
            "leading": self.leading.to_string(names),
            "classification": self.classification,
            "halfspace": None if self.halfspace is None else self.halfspace.to_dict(),
            "expansion": self.family.to_dict(),
        }


def _horizontal_linear_form(a: StratifiedAlgebra, Q: Polynomial) -> list[Fraction] | None:
    h = a.layer_indices(1)
    if Q.degree() != 1 or Q.constant_term() != 0 or not Q.used_variables() <= set(h):
        return None
    return [Q.coefficient(tuple(int(k == i) for k in range(a.dim))) for i in h]


def _positive_multiple(Q: Polynomial, P: Polynomial) -> bool:
    if Q.is_zero() or P.is_zero() or set(Q.terms) != set(P.terms):
        return False
    e = next(iter(P.terms))
    k = Q.coefficient(e) / P.coefficient(e)
    return k > 0 and Q == P * k


def tangent_limit(E: SublevelSet, x: GroupPoint) -> TangentLimit:
    a = E.algebra
    if E.P.evaluate(list(x.coords)) != 0:
        raise NotOnBoundary(f"P({x}) != 0: the base point is not on the boundary")
    fam = translate_dilate_pullback(E, x)
    if not fam.expansion:
        raise BlowupError("pullback vanishes identically")
    d0 = min(fam.expansion)
    Q = fam.expansion[d0]
    beta = _horizontal_linear_form(a, Q)
    if beta is not None and any(beta):
        return TangentLimit(d0, Q, "halfspace", HalfspaceSpec.from_affine(beta, Fraction(0)), fam)
    if len(fam.expansion) == 1 and _positive_multiple(Q, E.P):
        return TangentLimit(d0, Q, "self-similar", None, fam)
    return TangentLimit(d0, Q, "other", None, fam)


def tangent_invariant(t: TangentLimit, v: AlgVector) -> bool:
    """Is the tangent set {Q <= 0} invariant along v (vQ identically zero)?"""
    return apply_field(realize_left_invariant(v.algebra, v), t.leading).is_zero()


@dataclass
class ProbeReport:
    radii: list[float]
    measures: list[float]
    errors: list[float]
    scaled: list[float]
    slope: float
    local_slopes: list[float]
    top_layer: int
    tangent: TangentLimit | None
    tangent_invariant: bool | None

    @property
    def infinitesimal(self) -> bool:
        return self.slope > 0

    def to_dict(self) -> dict:
        return {
            "radii": self.radii,
            "measures": self.measures,
            "errors": self.errors,
            "scaled": self.scaled,
            "slope": self.slope,
            "local_slopes": self.local_slopes,
            "top_layer": self.top_layer,
            "trend_to_zero": self.infinitesimal,
            "tangent": None if self.tangent is None else self.tangent.to_dict(),
            "tangent_invariant": self.tangent_invariant,
        }


def provafis_probe(E: SublevelSet, Z: AlgVector, x: GroupPoint, radii: Sequence[float],
                   order: int = 8, subdiv: int = 4) -> ProbeReport:
    """r^{2-Q} |Z 1_E|(Q_r(x)) across radii, for Z without horizontal part.

    The fitted log2 slope is positive when the sequence tends to zero.
    """
    a = E.algebra
    if not Z.layer_part(1).is_zero():
        raise HorizontalComponent("Z must have no component in the first layer")
    if Z.is_zero():
        raise BlowupError("Z must be nonzero")
    top = max(Z.layers())
    Qd = a.homogeneous_dim
    meas, errs = [], []
    for r in radii:
        est = surface_measure(E, Z, ball_box(a, r, x), order, subdiv)
        meas.append(est.value)
        errs.append(est.error)
    radii = [float(r) for r in radii]
    scaled = [m * r ** (2 - Qd) for m, r in zip(meas, radii)]
    lr = np.log2(radii)
    with np.errstate(divide="ignore"):
        ls = np.log2(np.maximum(scaled, 1e-300))
    slope = float(np.polyfit(lr, ls, 1)[0]) if len(radii) > 1 else math.nan
    local = [float((ls[i + 1] - ls[i]) / (lr[i + 1] - lr[i])) for i in range(len(radii) - 1)]
    tangent = inv = None
    if E.P.evaluate(list(x.coords)) == 0:
        tangent = tangent_limit(E, x)
        if tangent.classification != "other":
            inv = tangent_invariant(tangent, Z.layer_part(top))
    return ProbeReport(radii, meas, errs, scaled, slope, local, top, tangent, inv)
