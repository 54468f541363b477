"""Sign certificates for polynomials.

The decision procedure is deliberately incomplete: it either certifies
positivity / nonnegativity with one of a few exact rules, or finds an exact
rational point where the polynomial is negative, or gives up with
``unknown``.  The falsifier always runs, also as a cross-check on the
certificates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polynomial import Polynomial

POSITIVE = "positive"
NONNEGATIVE = "nonnegative"
INDEFINITE = "indefinite"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class NonnegVerdict:
    verdict: str
    witness: tuple[Fraction, ...] | None = None
    certificate: str = ""

    def is_sign_definite(self) -> bool:
        return self.verdict in (POSITIVE, NONNEGATIVE)

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "certificate": self.certificate}
        if self.witness is not None:
            out["witness"] = [str(c) for c in self.witness]
        return out


def _certify(P: Polynomial, depth: int = 0) -> tuple[str, str] | None:
    """(verdict, rule) or None."""
    if P.is_constant():
        c = P.constant_term()
        if c > 0:
            return POSITIVE, "constant"
        if c == 0:
            return NONNEGATIVE, "constant"
        return None
    if all(c > 0 for _, c in P.items()) and all(k % 2 == 0 for e, _ in P.items() for k in e):
        return (POSITIVE if P.constant_term() > 0 else NONNEGATIVE), "even-powers"
    if depth > P.nvars:
        return None
    for i in sorted(P.used_variables()):
        if P.degree_in(i) != 2:
            continue
        A, B, C = P.coefficient_in(i, 2), P.coefficient_in(i, 1), P.coefficient_in(i, 0)
        lead = _certify(A, depth + 1)
        if lead is None or lead[0] != POSITIVE:
            continue
        # P = A (x_i + B/2A)^2 + (4AC - B^2)/4A with A > 0
        sub = _certify(4 * A * C - B * B, depth + 1)
        if sub is not None:
            return sub[0], f"discriminant(x{i + 1})"
    return None


def _grid_points(n: int, radius: int):
    vals = range(-radius, radius + 1)
    pts = sorted(itertools.product(vals, repeat=n), key=lambda p: (max(map(abs, p), default=0), sum(map(abs, p)), p))
    return pts


def find_negative_point(P: Polynomial, seed: int = 0, samples: int = 2000) -> tuple[Fraction, ...] | None:
    """Search for an exact rational point with P < 0."""
    n = P.nvars
    if n == 0:
        return () if P.constant_term() < 0 else None
    used = sorted(P.used_variables())
    k = len(used)

    def lift(sub) -> tuple[Fraction, ...]:
        full = [Fraction(0)] * n
        for i, v in zip(used, sub):
            full[i] = Fraction(v)
        return tuple(full)

    if k <= 4:
        for p in _grid_points(k, 3):
            pt = lift(p)
            if P.evaluate(pt) < 0:
                return pt
    f = P.lambdify()
    rng = np.random.default_rng(seed)
    best = None
    for scale in (1.0, 10.0, 0.1, 100.0):
        cand = rng.normal(scale=scale, size=(samples, k))
        full = np.zeros((samples, n))
        full[:, used] = cand
        vals = f(*full.T)
        j = int(np.argmin(vals))
        if best is None or vals[j] < best[0]:
            best = (vals[j], full[j].copy())
    # coordinate descent from the best sample
    x = best[1]
    step = 1.0
    cur = float(f(*x))
    for _ in range(200):
        improved = False
        for i in used:
            for d in (step, -step):
                y = x.copy()
                y[i] += d
                v = float(f(*y))
                if v < cur:
                    x, cur, improved = y, v, True
        if not improved:
            step /= 2
            if step < 1e-6:
                break
    for denom in (1, 2, 4, 8, 16, 100, 1000, 10**6):
        pt = tuple(Fraction(float(v)).limit_denominator(denom) for v in x)
        if P.evaluate(pt) < 0:
            return pt
    return None


def polynomial_nonneg(P: Polynomial, seed: int = 0) -> NonnegVerdict:
    cert = _certify(P)
    witness = find_negative_point(P, seed=seed)
    if cert is not None:
        if witness is not None:
            raise ArithmeticError(f"certificate {cert[1]} contradicted by witness {witness}")
        return NonnegVerdict(cert[0], None, cert[1])
    if witness is not None:
        return NonnegVerdict(INDEFINITE, witness, "witness")
    return NonnegVerdict(UNKNOWN, None, "")
