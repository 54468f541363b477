"""Subspace computations: bracket spans, adjoint orbits, invariant
directions of polynomial sublevel sets, and vertical halfspaces.

Every subspace is kept in exact reduced row-echelon form, so equality of
subspaces is a comparison of rows.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .algebra import AlgVector, StratifiedAlgebra, adjoint_exp, bracket, dilate_alg
from .fields import SublevelSet, apply_field, realize_left_invariant
from .nonneg import NonnegVerdict, find_negative_point, polynomial_nonneg
from .polynomial import Polynomial


class SpanError(ValueError):
    pass


class NotSubalgebraError(SpanError):
    pass


class HypothesisError(SpanError):
    """An escaping-adjoint hypothesis fails; ``hypothesis`` names the first."""

    def __init__(self, hypothesis: str, hypotheses: dict[str, bool]):
        self.hypothesis = hypothesis
        self.hypotheses = hypotheses
        super().__init__(f"hypothesis fails: {hypothesis}")


class SearchExhausted(SpanError):
    pass


@dataclass(frozen=True)
class Subspace:
    algebra: StratifiedAlgebra
    rows: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, a: StratifiedAlgebra, vectors: Iterable) -> "Subspace":
        rows = [tuple(v.coeffs) if isinstance(v, AlgVector) else tuple(v) for v in vectors]
        for r in rows:
            if len(r) != a.dim:
                raise SpanError("vector length does not match the algebra")
        red, piv = linalg.rref(rows)
        return cls(a, red, piv)

    @classmethod
    def zero(cls, a: StratifiedAlgebra) -> "Subspace":
        return cls(a, (), ())

    @classmethod
    def full(cls, a: StratifiedAlgebra) -> "Subspace":
        return cls.span(a, [a.basis(i) for i in range(a.dim)])

    @classmethod
    def layers(cls, a: StratifiedAlgebra, ks: Iterable[int]) -> "Subspace":
        ks = set(ks)
        return cls.span(a, [a.basis(i) for i, w in enumerate(a.weights) if w in ks])

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def codim(self) -> int:
        return self.algebra.dim - self.dim

    def basis(self) -> list[AlgVector]:
        return [AlgVector(self.algebra, r) for r in self.rows]

    def residual(self, v: AlgVector | Sequence) -> tuple[Fraction, ...]:
        coeffs = v.coeffs if isinstance(v, AlgVector) else v
        return linalg.reduce_vector(self.rows, self.pivots, coeffs)

    def contains(self, v: AlgVector | Sequence) -> bool:
        return not any(self.residual(v))

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.algebra, list(self.rows) + list(other.rows))

    def includes(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        if not self.rows or not other.rows:
            return Subspace.zero(self.algebra)
        n = self.algebra.dim
        cols = list(self.rows) + [tuple(-c for c in r) for r in other.rows]
        matrix = [[col[i] for col in cols] for i in range(n)]
        kernel = linalg.nullspace(matrix, len(cols))
        p = len(self.rows)
        vecs = []
        for sol in kernel:
            v = [Fraction(0)] * n
            for coef, r in zip(sol[:p], self.rows):
                if coef:
                    v = [a + coef * b for a, b in zip(v, r)]
            vecs.append(v)
        return Subspace.span(self.algebra, vecs)

    def homogeneous_part(self) -> "Subspace":
        """The sum over layers k of (self intersected with V_k)."""
        a = self.algebra
        pieces = Subspace.zero(a)
        for k in range(1, a.step + 1):
            pieces = pieces + self.intersect(Subspace.layers(a, [k]))
        return pieces

    def is_subalgebra(self) -> bool:
        b = self.basis()
        return all(self.contains(bracket(self.algebra, u, v)) for i, u in enumerate(b) for v in b[i + 1:])

    def bracket_closure(self) -> "Subspace":
        """The Lie subalgebra generated by this subspace."""
        cur = self
        while True:
            b = cur.basis()
            new = cur + Subspace.span(self.algebra, [bracket(self.algebra, u, v) for i, u in enumerate(b) for v in b[i + 1:]])
            if new.dim == cur.dim:
                return cur
            cur = new

    def to_dict(self) -> dict:
        return {"dim": self.dim, "basis": [[str(c) for c in r] for r in self.rows]}


# -- bracket spans ------------------------------------------------------

def iterated_bracket_span(a: StratifiedAlgebra, gprime: Subspace, x: AlgVector) -> Subspace:
    """[g', x] + [g', [g', x]] + ... to saturation."""
    if not gprime.is_subalgebra():
        raise NotSubalgebraError("g' is not closed under the bracket")
    gens = gprime.basis()
    total = Subspace.zero(a)
    level = [x]
    for _ in range(a.step):
        nxt = Subspace.span(a, [bracket(a, y, w) for y in gens for w in level])
        if nxt.dim == 0:
            break
        total = total + nxt
        level = nxt.basis()
    return total


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-6, 6), rng.randint(1, 4))


def _random_member(rng: random.Random, sub: Subspace) -> AlgVector:
    a = sub.algebra
    v = a.zero()
    for b in sub.basis():
        v = v + b * _random_rational(rng)
    return v


def ad_orbit_span(a: StratifiedAlgebra, gprime: Subspace, x: AlgVector, samples: int = 8, seed: int = 0) -> Subspace:
    """span{Ad_exp(y) x : y in g'} by deterministic sampling.

    Basis multiples with parameters 1..s come first, then seeded random
    combinations until the dimension is unchanged for ``samples``
    consecutive draws.
    """
    if not gprime.is_subalgebra():
        raise NotSubalgebraError("g' is not closed under the bracket")
    S = Subspace.span(a, [x])
    gens = gprime.basis()
    for t in range(1, a.step + 1):
        for b in gens:
            S = S + Subspace.span(a, [adjoint_exp(a, b * t, x)])
    if not gens:
        return S
    rng = random.Random(seed)
    quiet = 0
    while quiet < samples:
        y = _random_member(rng, gprime)
        grown = S + Subspace.span(a, [adjoint_exp(a, y, x)])
        quiet = quiet + 1 if grown.dim == S.dim else 0
        S = grown
    return S


@dataclass(frozen=True)
class EscapeResult:
    y: AlgVector
    image: AlgVector
    residual: tuple[Fraction, ...]
    attempts: int
    hypotheses: dict[str, bool]

    def to_dict(self) -> dict:
        return {
            "y": [str(c) for c in self.y.coeffs],
            "image": [str(c) for c in self.image.coeffs],
            "residual": [str(c) for c in self.residual],
            "attempts": self.attempts,
            "hypotheses": dict(self.hypotheses),
        }


def escape_hypotheses(a: StratifiedAlgebra, gprime: Subspace, x: AlgVector) -> dict[str, bool]:
    sub = gprime.is_subalgebra()
    W = gprime + Subspace.span(a, [x])
    return {
        "subalgebra": sub,
        "dimension": gprime.dim + 2 <= a.dim,
        "x_outside": not gprime.contains(x),
        "generation": W.bracket_closure().dim == a.dim,
    }


def find_escaping_adjoint(a: StratifiedAlgebra, gprime: Subspace, x: AlgVector, seed: int = 0,
                          max_attempts: int = 1000) -> EscapeResult:
    """Find y in g' with Ad_exp(y) x outside W = g' + Rx."""
    hyp = escape_hypotheses(a, gprime, x)
    failed = next((k for k, ok in hyp.items() if not ok), None)
    if failed:
        raise HypothesisError(failed, hyp)
    W = gprime + Subspace.span(a, [x])
    gens = gprime.basis()

    def candidates():
        for t in (1, 2):
            for b in gens:
                yield b * t
        rng = random.Random(seed)
        while True:
            yield _random_member(rng, gprime)

    for attempt, y in enumerate(candidates(), start=1):
        if attempt > max_attempts:
            break
        img = adjoint_exp(a, y, x)
        res = W.residual(img)
        if any(res):
            return EscapeResult(y, img, res, attempt, hyp)
    raise SearchExhausted(f"no escaping adjoint found in {max_attempts} attempts")


# -- invariant directions -----------------------------------------------

def direction_derivatives(a: StratifiedAlgebra, E: SublevelSet) -> list[Polynomial]:
    return [apply_field(realize_left_invariant(a, a.basis(j)), E.P) for j in range(a.dim)]


def invariant_directions(a: StratifiedAlgebra, E: SublevelSet) -> Subspace:
    """All v with (realized v) P identically zero."""
    derivs = direction_derivatives(a, E)
    monomials = sorted({e for d in derivs for e in d.terms})
    if not monomials:
        return Subspace.full(a)
    matrix = [[d.coefficient(m) for d in derivs] for m in monomials]
    return Subspace.span(a, linalg.nullspace(matrix, a.dim))


def _affine_variable(P: Polynomial) -> int | None:
    """Index of a variable in which P is affine with a constant coefficient."""
    for i in sorted(P.used_variables(), reverse=True):
        if P.degree_in(i) == 1 and P.coefficient_in(i, 1).is_constant():
            return i
    return None


def ideal_membership(P: Polynomial, Q: Polynomial) -> bool | None:
    """Is Q in the principal ideal (P)?  Decided only when P is monic-linear
    (up to a constant) in some variable; None otherwise."""
    d = _affine_variable(P)
    if d is None:
        return None
    c = P.coefficient_in(d, 1).constant_term()
    rest = P.coefficient_in(d, 0)
    args = Polynomial.variables(P.nvars)
    args[d] = -rest / c
    return Q.substitute(args, P.nvars).is_zero()


def invariance_certificates(a: StratifiedAlgebra, E: SublevelSet) -> list[dict]:
    out = []
    for j, d in enumerate(direction_derivatives(a, E)):
        out.append({
            "direction": j + 1,
            "layer": a.weights[j],
            "derivative": d.to_string(),
            "identically_zero": d.is_zero(),
            "in_ideal": ideal_membership(E.P, d),
        })
    return out


# -- halfspaces ---------------------------------------------------------

def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class HalfspaceSpec:
    """H = {direction . a <= offset} over horizontal coordinates a.

    ``direction`` is scaled by a positive factor so that its first nonzero
    entry has absolute value 1; the orientation is kept (it is the outward
    horizontal normal).  ``offset`` is None when it could not be recovered.
    """

    direction: tuple[Fraction, ...]
    offset: Fraction | None

    @classmethod
    def from_affine(cls, beta: Sequence[Fraction], rhs: Fraction | None) -> "HalfspaceSpec":
        beta = [Fraction(b) for b in beta]
        first = next((b for b in beta if b), None)
        if first is None:
            raise ValueError("halfspace normal must be nonzero")
        s = abs(first)
        return cls(tuple(b / s for b in beta), None if rhs is None else rhs / s)

    @property
    def norm_sq(self) -> Fraction:
        return sum((b * b for b in self.direction), Fraction(0))

    @property
    def nu(self) -> tuple[float, ...]:
        n = math.sqrt(self.norm_sq)
        return tuple(float(b) / n for b in self.direction)

    @property
    def c(self) -> float | None:
        return None if self.offset is None else float(self.offset) / math.sqrt(self.norm_sq)

    @property
    def nu_exact(self) -> tuple[Fraction, ...] | None:
        r = _rational_sqrt(self.norm_sq)
        return None if r is None else tuple(b / r for b in self.direction)

    @property
    def c_exact(self) -> Fraction | None:
        r = _rational_sqrt(self.norm_sq)
        return None if r is None or self.offset is None else self.offset / r

    def to_dict(self) -> dict:
        out = {
            "direction": [str(b) for b in self.direction],
            "offset": None if self.offset is None else str(self.offset),
            "nu": list(self.nu),
            "c": self.c,
        }
        if self.nu_exact is not None:
            out["nu_exact"] = [str(b) for b in self.nu_exact]
            out["c_exact"] = None if self.c_exact is None else str(self.c_exact)
        return out


@dataclass(frozen=True)
class ConeCheck:
    is_cone: bool | None
    certificate: str
    witness: tuple[Fraction, ...] | None = None
    scale: Fraction | None = None

    def to_dict(self) -> dict:
        out = {"is_cone": self.is_cone, "certificate": self.certificate}
        if self.witness is not None:
            out["witness"] = [str(c) for c in self.witness]
            out["scale"] = str(self.scale)
        return out


def cone_check(a: StratifiedAlgebra, E: SublevelSet) -> ConeCheck:
    """Is delta_r E = E for all r > 0?  Homogeneity certifies; a point that
    leaves E under some dilation refutes."""
    P = E.P
    if P.is_weighted_homogeneous(a.weights):
        return ConeCheck(True, "weighted-homogeneous")
    used = sorted(P.used_variables())
    vals = [Fraction(k, 4) for k in range(-8, 9)]
    rng = random.Random(0)
    for _ in range(4000):
        y = [Fraction(0)] * a.dim
        for i in used:
            y[i] = rng.choice(vals)
        if P.evaluate(y) > 0:
            continue
        for lam in (Fraction(2), Fraction(1, 2), Fraction(3), Fraction(1, 3)):
            z = [c * lam ** w for c, w in zip(y, a.weights)]
            if P.evaluate(z) > 0:
                return ConeCheck(False, "dilation-witness", tuple(y), lam)
    return ConeCheck(None, "undecided")


@dataclass
class HalfspaceClassification:
    halfspace: HalfspaceSpec | None
    diagnosis: str
    invariants: Subspace
    inv0_codim: int
    horizontal_codim: int
    constant_normal: HalfspaceSpec | None = None
    normal_verdict: NonnegVerdict | None = None
    cone: ConeCheck | None = None
    details: dict = field(default_factory=dict)

    @property
    def is_halfspace(self) -> bool:
        return self.halfspace is not None

    def to_dict(self) -> dict:
        return {
            "is_halfspace": self.is_halfspace,
            "halfspace": None if self.halfspace is None else self.halfspace.to_dict(),
            "diagnosis": self.diagnosis,
            "inv0": self.invariants.to_dict(),
            "inv0_codim": self.inv0_codim,
            "horizontal_codim": self.horizontal_codim,
            "constant_normal": None if self.constant_normal is None else self.constant_normal.to_dict(),
            "normal_verdict": None if self.normal_verdict is None else self.normal_verdict.to_dict(),
            "cone": None if self.cone is None else self.cone.to_dict(),
            **self.details,
        }


def _horizontal_normal(a: StratifiedAlgebra, E: SublevelSet, inv0: Subspace, seed: int):
    """Constant horizontal normal certificate, or (None, verdict)."""
    h_idx = a.layer_indices(1)
    horiz = inv0.intersect(Subspace.layers(a, [1]))
    if a.rank - horiz.dim != 1:
        return None, None
    # orthogonal complement of horiz inside V1 (adapted basis orthonormal)
    rows = [[r[i] for i in h_idx] for r in horiz.rows]
    comp = linalg.nullspace(rows, len(h_idx)) if rows else [tuple(Fraction(int(k == 0)) for k in range(len(h_idx)))]
    beta = comp[0]
    X = a.zero()
    for i, b in zip(h_idx, beta):
        X = X + a.basis(i) * b
    XP = apply_field(realize_left_invariant(a, X), E.P)
    if XP.is_zero():
        return None, None
    up = polynomial_nonneg(XP, seed=seed)
    if up.is_sign_definite():
        return HalfspaceSpec.from_affine(beta, None), up
    down = polynomial_nonneg(-XP, seed=seed)
    if down.is_sign_definite():
        return HalfspaceSpec.from_affine([-b for b in beta], None), down
    return None, up


def classify_vertical_halfspace(a: StratifiedAlgebra, E: SublevelSet, seed: int = 0) -> HalfspaceClassification:
    inv0 = invariant_directions(a, E).homogeneous_part()
    horiz = inv0.intersect(Subspace.layers(a, [1]))
    hcodim = a.rank - horiz.dim
    normal, verdict = _horizontal_normal(a, E, inv0, seed)
    cone = cone_check(a, E)
    result = HalfspaceClassification(None, "", inv0, inv0.codim, hcodim, normal, verdict, cone)

    if inv0.codim != 1:
        result.diagnosis = f"not-a-halfspace: Inv0 codimension {inv0.codim}"
        return result
    if a.step > 1 and not inv0.includes(Subspace.layers(a, range(2, a.step + 1))):
        result.diagnosis = "not-a-halfspace: Inv0 misses a higher-layer direction"
        return result
    if hcodim != 1:
        result.diagnosis = f"not-a-halfspace: horizontal invariant codimension {hcodim}"
        return result
    if normal is None:
        result.diagnosis = "not-a-halfspace: no sign-definite horizontal derivative"
        return result

    P = E.P
    h_idx = a.layer_indices(1)
    affine = P.degree() <= 1 and P.used_variables() <= set(h_idx)
    if affine:
        beta = [P.coefficient(tuple(int(k == i) for k in range(a.dim))) for i in h_idx]
        result.halfspace = HalfspaceSpec.from_affine(beta, -P.constant_term())
        result.diagnosis = "halfspace"
    else:
        result.halfspace = normal
        result.diagnosis = "halfspace (offset not recovered: P not affine in horizontal coordinates)"
    return result


def horizontal_direction_field(a: StratifiedAlgebra, nu: Sequence[Fraction]) -> AlgVector:
    X = a.zero()
    for i, b in zip(a.layer_indices(1), nu):
        X = X + a.basis(i) * b
    return X


def derived_invariants_step2(a: StratifiedAlgebra, inv: Subspace, x: AlgVector) -> Subspace:
    """Enlarge inv by ad_y^{s-1}(x) = [y, x] for y in inv, then close under bracket.

    Only step-2 groups: the sign argument behind this enlargement needs s even.
    """
    if a.step != 2:
        raise SpanError("derived_invariants_step2 requires a step-2 group")
    extra = [bracket(a, y, x) for y in inv.basis()]
    return (inv + Subspace.span(a, extra)).bracket_closure()
