"""The group law in exponential coordinates.

``bch`` is the Baker-Campbell-Hausdorff product on the Lie algebra, computed
from Dynkin's explicit series truncated at the step of the algebra.  Group
points carry coordinates in the algebra's chart: for ``chart="first"`` the
coordinates of ``exp(sum x_i X_i)``, for ``chart="second"`` those of
``exp(x_n X_n) ... exp(x_1 X_1)``.  Second-kind coordinates are converted
through exact polynomial maps, so every operation stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .algebra import AlgebraError, AlgVector, StratifiedAlgebra, _check_lambda, _scalar, bracket
from .polynomial import Polynomial, as_fraction, is_scalar


# -- Dynkin series ------------------------------------------------------

def _blocks(total: int, k: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """All k-tuples of pairs (r, s), r + s >= 1, summing to ``total``."""
    if k == 0:
        if total == 0:
            yield ()
        return
    for size in range(1, total - (k - 1) + 1):
        for r in range(size + 1):
            for rest in _blocks(total - size, k - 1):
                yield ((r, size - r),) + rest


@lru_cache(maxsize=None)
def dynkin_coefficients(degree: int) -> dict[tuple[int, ...], Fraction]:
    """Coefficients of right-nested bracket words of length ``degree``.

    Word letters are 0 for X and 1 for Y; the word ``(w1, ..., wN)`` stands
    for ``[w1, [w2, ..., [w_{N-1}, w_N]]]``.  Words whose innermost bracket
    is trivially zero are dropped.
    """
    out: dict[tuple[int, ...], Fraction] = {}
    for k in range(1, degree + 1):
        sign = Fraction((-1) ** (k - 1), k * degree)
        for blocks in _blocks(degree, k):
            coeff = sign
            word: list[int] = []
            for r, s in blocks:
                coeff /= math.factorial(r) * math.factorial(s)
                word += [0] * r + [1] * s
            if degree > 1 and word[-1] == word[-2]:
                continue
            key = tuple(word)
            out[key] = out.get(key, Fraction(0)) + coeff
    return {w: c for w, c in out.items() if c}


def bch(a: StratifiedAlgebra, x: AlgVector, y: AlgVector) -> AlgVector:
    """``log(exp(x) exp(y))`` via the Dynkin series up to bracket degree s."""
    letters = (x, y)
    memo: dict[tuple[int, ...], AlgVector] = {}

    def nested(word: tuple[int, ...]) -> AlgVector:
        if len(word) == 1:
            return letters[word[0]]
        if word not in memo:
            memo[word] = bracket(a, letters[word[0]], nested(word[1:]))
        return memo[word]

    total = x + y
    for degree in range(2, a.step + 1):
        for word, c in dynkin_coefficients(degree).items():
            v = nested(word)
            if not v.is_zero():
                total = total + v * c
    return total


# -- charts -------------------------------------------------------------

@lru_cache(maxsize=64)
def _second_kind_maps(a: StratifiedAlgebra) -> tuple[tuple[Polynomial, ...], tuple[Polynomial, ...]]:
    """(sigma, sigma_inverse): second-kind coordinates <-> first-kind coordinates."""
    n = a.dim
    ys = Polynomial.variables(n)
    zero = Polynomial.zero(n)

    def axis(i: int) -> AlgVector:
        return AlgVector(a, tuple(ys[i] if k == i else zero for k in range(n)))

    acc = axis(n - 1)
    for i in range(n - 2, -1, -1):
        acc = bch(a, acc, axis(i))
    sigma = tuple(acc.coeffs)

    # sigma = id + terms depending only on lower layers, so the
    # fixed-point iteration z <- z + (x - sigma(z)) terminates in <= s steps
    z = tuple(ys)
    for _ in range(a.step + 1):
        img = tuple(p.substitute(z, n) for p in sigma)
        if img == tuple(ys):
            break
        z = tuple(zi + xi - si for zi, xi, si in zip(z, ys, img))
    else:
        raise AlgebraError("second-kind chart inversion did not terminate; is the algebra graded?")
    return sigma, z


def apply_polynomial_map(polys: Sequence[Polynomial], coords: Sequence) -> tuple:
    if all(not isinstance(c, Polynomial) for c in coords):
        return tuple(p.evaluate(coords) for p in polys)
    nv = next(c.nvars for c in coords if isinstance(c, Polynomial))
    args = [c if isinstance(c, Polynomial) else Polynomial.constant(c, nv) for c in coords]
    return tuple(p.substitute(args, nv) for p in polys)


def chart_to_first(a: StratifiedAlgebra, coords: Sequence) -> tuple:
    if a.chart == "first":
        return tuple(coords)
    return apply_polynomial_map(_second_kind_maps(a)[0], coords)


def first_to_chart(a: StratifiedAlgebra, coords: Sequence) -> tuple:
    if a.chart == "first":
        return tuple(coords)
    return apply_polynomial_map(_second_kind_maps(a)[1], coords)


# -- group points -------------------------------------------------------

@dataclass(frozen=True)
class GroupPoint:
    """A point of the group in the algebra's chart coordinates."""

    algebra: StratifiedAlgebra
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.algebra.dim:
            raise AlgebraError(f"point has {len(self.coords)} coordinates, group has dimension {self.algebra.dim}")

    def is_identity(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coords)


def point(a: StratifiedAlgebra, coords: Sequence) -> GroupPoint:
    return GroupPoint(a, tuple(_scalar(c) for c in coords))


def identity(a: StratifiedAlgebra) -> GroupPoint:
    return GroupPoint(a, (Fraction(0),) * a.dim)


def exp_point(a: StratifiedAlgebra, v: AlgVector) -> GroupPoint:
    """exp(v) in chart coordinates."""
    return GroupPoint(a, first_to_chart(a, v.coeffs))


def log_point(g: GroupPoint) -> AlgVector:
    a = g.algebra
    return AlgVector(a, chart_to_first(a, g.coords))


def _same_group(x: GroupPoint, y: GroupPoint):
    if x.algebra is not y.algebra and x.algebra != y.algebra:
        raise AlgebraError("points belong to different groups")


def bch_product(a: StratifiedAlgebra, x: GroupPoint, y: GroupPoint) -> GroupPoint:
    _same_group(x, y)
    if x.algebra != a:
        raise AlgebraError("points do not belong to this group")
    z = bch(a, log_point(x), log_point(y))
    return exp_point(a, z)


def group_inverse(x: GroupPoint) -> GroupPoint:
    a = x.algebra
    if a.chart == "first":
        return GroupPoint(a, tuple(-c for c in x.coords))
    return exp_point(a, -log_point(x))


def conjugate(k: GroupPoint, g: GroupPoint) -> GroupPoint:
    """C_k(g) = k g k^-1."""
    a = k.algebra
    return bch_product(a, bch_product(a, k, g), group_inverse(k))


def dilate_group(lam, g: GroupPoint) -> GroupPoint:
    """delta_lam on the group; diagonal in either chart."""
    lam = _check_lambda(lam)
    a = g.algebra
    return GroupPoint(a, tuple(c * lam ** w for c, w in zip(g.coords, a.weights)))


def flow(g: GroupPoint, x: AlgVector, t) -> GroupPoint:
    """Flow of the left-invariant field x for time t from g: ``g exp(t x)``."""
    a = g.algebra
    t = _scalar(t)
    return bch_product(a, g, exp_point(a, x * t))


def parse_point(a: StratifiedAlgebra, text: str) -> GroupPoint:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != a.dim:
        raise AlgebraError(f"expected {a.dim} comma-separated coordinates, got {len(parts)}")
    return point(a, [as_fraction(p) for p in parts])


def parse_vector(a: StratifiedAlgebra, text: str) -> AlgVector:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != a.dim:
        raise AlgebraError(f"expected {a.dim} comma-separated coefficients, got {len(parts)}")
    return a.vector([as_fraction(p) for p in parts])


def format_coords(coords: Sequence) -> list[str]:
    return [str(c) if is_scalar(c) else c.to_string() for c in coords]
