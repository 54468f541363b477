"""Stratified nilpotent Lie algebras in an adapted basis.

Basis vectors are indexed from 0 internally; the structure constants
``c[k, i, j]`` (bracket ``[X_i, X_j] = sum_k c[k, i, j] X_k``) are stored
only for ``i < j``.  Antisymmetry is synthesised, so it cannot be violated
by a stored table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import linalg
from .polynomial import Polynomial, as_fraction, is_scalar

CHARTS = ("first", "second")


class AlgebraError(ValueError):
    """Malformed algebra data or mismatched algebra elements."""


class StratifiedAlgebra:
    """Structure constants plus a layer grading.

    Parameters
    ----------
    weights:
        Layer of every basis vector, nondecreasing (adapted basis).
    brackets:
        ``{(i, j): {k: c}}`` with 0-based ``i < j``.
    chart:
        Coordinates used for group points and realized fields:
        ``"first"`` (exponential coordinates of the first kind) or
        ``"second"`` (``exp(x_n X_n) ... exp(x_1 X_1)``).
    """

    def __init__(
        self,
        weights: Sequence[int],
        brackets: Mapping[tuple[int, int], Mapping[int, object]] | None = None,
        *,
        name: str = "",
        chart: str = "first",
    ):
        self.weights = tuple(int(w) for w in weights)
        if not self.weights:
            raise AlgebraError("an algebra needs at least one basis vector")
        if chart not in CHARTS:
            raise AlgebraError(f"unknown chart {chart!r}")
        self.name = name
        self.chart = chart
        n = len(self.weights)
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        self._conflicts: list[tuple[int, int]] = []
        for (i, j), row in (brackets or {}).items():
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise AlgebraError(f"bracket index ({i}, {j}) out of range")
            entries = {int(k): as_fraction(c) for k, c in row.items()}
            for k in entries:
                if not 0 <= k < n:
                    raise AlgebraError(f"bracket target {k} out of range")
            if i == j:
                if any(entries.values()):
                    self._conflicts.append((i, j))
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            entries = {k: sign * c for k, c in entries.items() if c}
            if (i, j) in table and table[(i, j)] != entries:
                self._conflicts.append((i, j))
            if entries:
                table[(i, j)] = entries
        self._table = table

    # -- basic data ------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def step(self) -> int:
        return max(self.weights)

    @property
    def homogeneous_dim(self) -> int:
        return sum(self.weights)

    @property
    def rank(self) -> int:
        """m = dim V_1."""
        return sum(1 for w in self.weights if w == 1)

    def layer_indices(self, k: int) -> list[int]:
        return [i for i, w in enumerate(self.weights) if w == k]

    @property
    def structure_constants(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        return {key: dict(row) for key, row in self._table.items()}

    def constant(self, k: int, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        if i < j:
            return self._table.get((i, j), {}).get(k, Fraction(0))
        return -self._table.get((j, i), {}).get(k, Fraction(0))

    @cached_property
    def _dense(self) -> list[list[list[tuple[int, Fraction]]]]:
        n = self.dim
        dense = [[[] for _ in range(n)] for _ in range(n)]
        for (i, j), row in self._table.items():
            for k, c in sorted(row.items()):
                dense[i][j].append((k, c))
                dense[j][i].append((k, -c))
        return dense

    def with_chart(self, chart: str) -> "StratifiedAlgebra":
        return StratifiedAlgebra(self.weights, self._table, name=self.name, chart=chart)

    # -- equality --------------------------------------------------------
    def _key(self):
        table = tuple(sorted((ij, tuple(sorted(row.items()))) for ij, row in self._table.items()))
        return (self.weights, table, self.chart)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StratifiedAlgebra):
            return NotImplemented
        return self is other or self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        label = self.name or "algebra"
        return f"<StratifiedAlgebra {label} dim={self.dim} step={self.step} chart={self.chart}>"

    # -- elements --------------------------------------------------------
    def vector(self, coeffs: Iterable) -> "AlgVector":
        return AlgVector(self, tuple(_scalar(c) for c in coeffs))

    def basis(self, i: int) -> "AlgVector":
        return AlgVector(self, tuple(Fraction(int(k == i)) for k in range(self.dim)))

    def zero(self) -> "AlgVector":
        return AlgVector(self, (Fraction(0),) * self.dim)

    def generic(self, nvars: int | None = None, offset: int = 0) -> "AlgVector":
        """Vector whose coefficients are the indeterminates x_{offset+1}.."""
        nvars = self.dim + offset if nvars is None else nvars
        return AlgVector(self, tuple(Polynomial.variable(offset + i, nvars) for i in range(self.dim)))


def _scalar(c):
    if isinstance(c, Polynomial):
        return c
    return as_fraction(c)


@dataclass(frozen=True)
class AlgVector:
    """An element of the algebra; coefficients are rationals or Polynomials."""

    algebra: StratifiedAlgebra
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.algebra.dim:
            raise AlgebraError(f"vector has {len(self.coeffs)} coefficients, algebra has dimension {self.algebra.dim}")

    def _check(self, other: "AlgVector"):
        if not isinstance(other, AlgVector):
            raise TypeError("expected an AlgVector")
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraError("vectors belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgVector(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return AlgVector(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return AlgVector(self.algebra, tuple(-a for a in self.coeffs))

    def __mul__(self, scalar):
        if not (is_scalar(scalar) or isinstance(scalar, Polynomial)):
            return NotImplemented
        s = _scalar(scalar)
        return AlgVector(self.algebra, tuple(s * a for a in self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / as_fraction(scalar))

    def __getitem__(self, i: int):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def layer_part(self, k: int) -> "AlgVector":
        w = self.algebra.weights
        return AlgVector(self.algebra, tuple(c if w[i] == k else c * 0 for i, c in enumerate(self.coeffs)))

    def layers(self) -> list[int]:
        """Layers in which the vector has a nonzero component."""
        w = self.algebra.weights
        return sorted({w[i] for i, c in enumerate(self.coeffs) if c != 0})

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c != 0:
                parts.append(f"({c})X{i + 1}" if isinstance(c, Polynomial) else f"{c}*X{i + 1}")
        return " + ".join(parts) or "0"


# -- operations ----------------------------------------------------------

def bracket(a: StratifiedAlgebra, x: AlgVector, y: AlgVector) -> AlgVector:
    """Lie bracket by bilinear expansion over the structure constants."""
    for v in (x, y):
        if v.algebra is not a and v.algebra != a:
            raise AlgebraError("dimension or algebra mismatch in bracket")
    dense = a._dense
    out = [Fraction(0)] * a.dim
    xs = [(i, c) for i, c in enumerate(x.coeffs) if c != 0]
    ys = [(j, c) for j, c in enumerate(y.coeffs) if c != 0]
    for i, xi in xs:
        row = dense[i]
        for j, yj in ys:
            entries = row[j]
            if not entries:
                continue
            prod = xi * yj
            for k, c in entries:
                out[k] = out[k] + c * prod
    return AlgVector(a, tuple(out))


def ad_power(a: StratifiedAlgebra, y: AlgVector, x: AlgVector, k: int) -> AlgVector:
    for _ in range(k):
        x = bracket(a, y, x)
    return x


def adjoint_exp(a: StratifiedAlgebra, y: AlgVector, x: AlgVector) -> AlgVector:
    """``Ad_exp(y) x = sum_{i<s} ad_y^i(x) / i!``; finite by nilpotency."""
    total = x
    term = x
    for i in range(1, a.step):
        term = bracket(a, y, term)
        if term.is_zero():
            break
        total = total + term * Fraction(1, math.factorial(i))
    return total


def dilate_alg(a: StratifiedAlgebra, lam, x: AlgVector) -> AlgVector:
    """Intrinsic dilation: coefficient i scaled by ``lam**w_i``."""
    lam = _check_lambda(lam)
    return AlgVector(a, tuple(c * lam ** w for c, w in zip(x.coeffs, a.weights)))


def _check_lambda(lam):
    if isinstance(lam, Polynomial):
        return lam
    if isinstance(lam, float):
        if lam < 0:
            raise ValueError("dilation factor must be nonnegative")
        return lam
    lam = as_fraction(lam)
    if lam < 0:
        raise ValueError("dilation factor must be nonnegative")
    return lam


# -- validation ----------------------------------------------------------

@dataclass
class ValidationReport:
    checks: dict[str, bool]
    step: int
    homogeneous_dim: int
    rank: int
    witnesses: dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def first_failure(self) -> str | None:
        return next((name for name, passed in self.checks.items() if not passed), None)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": dict(self.checks),
            "step": self.step,
            "homogeneous_dim": self.homogeneous_dim,
            "rank": self.rank,
            "witnesses": {k: _jsonable(v) for k, v in self.witnesses.items()},
        }


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    return v


def validate_algebra(a: StratifiedAlgebra) -> ValidationReport:
    """Check antisymmetry, Jacobi, grading, generation and nilpotency exactly.

    Witness indices are reported 1-based.
    """
    n, w, s = a.dim, a.weights, a.step
    checks: dict[str, bool] = {}
    wit: dict[str, object] = {}

    checks["antisymmetry"] = not a._conflicts
    if a._conflicts:
        i, j = a._conflicts[0]
        wit["antisymmetry"] = (i + 1, j + 1)

    layout_ok = w[0] == 1 and all(b - c in (0, 1) for c, b in zip(w, w[1:]))
    checks["adapted_basis"] = layout_ok
    if not layout_ok:
        wit["adapted_basis"] = list(w)

    jac_ok = True
    basis = [a.basis(i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                x, y, z = basis[i], basis[j], basis[k]
                total = (bracket(a, x, bracket(a, y, z)) + bracket(a, y, bracket(a, z, x))
                         + bracket(a, z, bracket(a, x, y)))
                if not total.is_zero():
                    jac_ok = False
                    wit["jacobi"] = (i + 1, j + 1, k + 1)
                    break
            if not jac_ok:
                break
        if not jac_ok:
            break
    checks["jacobi"] = jac_ok

    grading_ok = nil_ok = True
    for (i, j), row in sorted(a._table.items()):
        for k, c in sorted(row.items()):
            if c and w[k] != w[i] + w[j]:
                if grading_ok:
                    wit["grading"] = (i + 1, j + 1, k + 1)
                grading_ok = False
            if c and w[i] + w[j] > s:
                if nil_ok:
                    wit["nilpotency"] = (i + 1, j + 1, k + 1)
                nil_ok = False
    checks["grading"] = grading_ok
    checks["nilpotency"] = nil_ok

    gen_ok = layout_ok
    if layout_ok:
        v1 = a.layer_indices(1)
        for j in range(1, s):
            rows = [bracket(a, basis[p], basis[q]).coeffs for p in a.layer_indices(j) for q in v1]
            target = [basis[t].coeffs for t in a.layer_indices(j + 1)]
            got = linalg.rref(rows)[0]
            want = linalg.rref(target)[0]
            if got != want:
                gen_ok = False
                wit["generation"] = j + 1
                break
    checks["generation"] = gen_ok
    return ValidationReport(checks, s, a.homogeneous_dim, a.rank, wit)


def require_valid(a: StratifiedAlgebra) -> StratifiedAlgebra:
    report = validate_algebra(a)
    if not report.ok:
        raise InvalidAlgebra(report)
    return a


class InvalidAlgebra(AlgebraError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(f"algebra fails validation: {report.first_failure()} ({report.witnesses})")
