"""Exact multivariate polynomials with rational coefficients.

A :class:`Polynomial` is a sparse map from exponent tuples to
:class:`fractions.Fraction` coefficients.  Zero coefficients are never
stored, so two polynomials are equal exactly when their term tables are.

Text format (used by the command line)::

    x2 - x1*x3 + 1/2*x1^2*x4

Variables are ``x1 .. xn`` (1-based), rationals are written ``p/q``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: exact code paths must never see them silently.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction, np.integer)) and not isinstance(value, bool)


class Polynomial:
    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent {exps} does not have {nvars} entries")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = as_fraction(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> "Polynomial":
        # trusted constructor: terms already canonical
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> "Polynomial":
        c = as_fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        """The coordinate function x_{i+1} (``i`` is 0-based)."""
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[i] = 1
        return cls._raw(nvars, {tuple(exps): Fraction(1)})

    @classmethod
    def variables(cls, nvars: int) -> list["Polynomial"]:
        return [cls.variable(i, nvars) for i in range(nvars)]

    # -- inspection ------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self._terms), default=-1)

    def weighted_degree(self, weights: Sequence[int]) -> int:
        return max((_wdeg(e, weights) for e in self._terms), default=-1)

    def weighted_parts(self, weights: Sequence[int]) -> dict[int, "Polynomial"]:
        parts: dict[int, dict[Exponent, Fraction]] = {}
        for e, c in self._terms.items():
            parts.setdefault(_wdeg(e, weights), {})[e] = c
        return {d: Polynomial._raw(self.nvars, t) for d, t in sorted(parts.items())}

    def is_weighted_homogeneous(self, weights: Sequence[int]) -> bool:
        return len({_wdeg(e, weights) for e in self._terms}) <= 1

    def used_variables(self) -> set[int]:
        return {i for e in self._terms for i, k in enumerate(e) if k}

    def coefficient_in(self, i: int, k: int) -> "Polynomial":
        """Coefficient of x_i^k, as a polynomial not involving x_i."""
        out = {}
        for e, c in self._terms.items():
            if e[i] == k:
                out[e[:i] + (0,) + e[i + 1:]] = c
        return Polynomial._raw(self.nvars, out)

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(c) for c in self._terms.values()), default=Fraction(0))

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if is_scalar(other):
            return Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __pos__(self) -> "Polynomial":
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if is_scalar(other):
            c = as_fraction(other)
            if not c:
                return Polynomial.zero(self.nvars)
            return Polynomial._raw(self.nvars, {e: v * c for e, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not is_scalar(other):
            return NotImplemented
        c = as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = Polynomial.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if is_scalar(other):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and composition ---------------------------------------
    def diff(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return Polynomial._raw(self.nvars, out)

    def gradient(self) -> list["Polynomial"]:
        return [self.diff(i) for i in range(self.nvars)]

    def evaluate(self, point: Sequence):
        """Evaluate at ``point``; exact when the entries are rationals.

        Entries may also be any ring elements that support ``+`` and ``*``
        with Fractions (e.g. Polynomials), see :meth:`substitute`.
        """
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(point)}")
        point = [as_fraction(p) if is_scalar(p) else p for p in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for p, k in zip(point, e):
                if k:
                    term = term * p**k
            total = total + term
        return total

    def __call__(self, *point):
        return self.evaluate(point)

    def substitute(self, args: Sequence, nvars: int | None = None) -> "Polynomial":
        """Compose: replace x_i by ``args[i]`` (Polynomials or rationals)."""
        if len(args) != self.nvars:
            raise ValueError(f"substitute needs {self.nvars} arguments, got {len(args)}")
        if nvars is None:
            nvars = next((a.nvars for a in args if isinstance(a, Polynomial)), None)
            if nvars is None:
                return Polynomial.constant(self.evaluate(args), 0)
        polys = [a if isinstance(a, Polynomial) else Polynomial.constant(a, nvars) for a in args]
        for a in polys:
            if a.nvars != nvars:
                raise ValueError("substitution arguments disagree on the variable count")
        powers: list[dict[int, Polynomial]] = [{0: Polynomial.constant(1, nvars), 1: a} for a in polys]

        def power(i: int, k: int) -> Polynomial:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * polys[i]
            return cache[k]

        total = Polynomial.zero(nvars)
        for e, c in self._terms.items():
            term = Polynomial.constant(c, nvars)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total

    def embed(self, nvars: int, positions: Sequence[int] | None = None) -> "Polynomial":
        """Re-home into ``nvars`` variables, variable i going to ``positions[i]``."""
        if positions is None:
            positions = range(self.nvars)
        positions = list(positions)
        if len(positions) != self.nvars:
            raise ValueError("need one position per variable")
        out = {}
        for e, c in self._terms.items():
            new = [0] * nvars
            for i, k in zip(positions, e):
                new[i] += k
            out[tuple(new)] = c
        return Polynomial._raw(nvars, out)

    def truncate_vars(self, nvars: int) -> "Polynomial":
        """Drop trailing variables, which must not occur."""
        out = {}
        for e, c in self._terms.items():
            if any(e[nvars:]):
                raise ValueError("polynomial depends on a dropped variable")
            out[e[:nvars]] = c
        return Polynomial._raw(nvars, out)

    # -- numerics --------------------------------------------------------
    def lambdify(self) -> Callable[..., np.ndarray]:
        """Return a float64 vectorised evaluator ``f(*arrays)``."""
        terms = [(float(c), e) for e, c in sorted(self._terms.items())]

        def f(*xs):
            if len(xs) != self.nvars:
                raise ValueError(f"expected {self.nvars} arrays")
            shape = np.broadcast(*xs).shape if xs else ()
            out = np.zeros(shape)
            for c, e in terms:
                t = np.full(shape, c)
                for x, k in zip(xs, e):
                    if k:
                        t = t * x**k
                out = out + t
            return out

        return f

    def interval(self, bounds: Sequence[tuple[float, float]]) -> tuple[float, float]:
        """Outer enclosure of the range over a box (naive interval arithmetic)."""
        lo_tot = hi_tot = 0.0
        for e, c in self._terms.items():
            lo, hi = float(c), float(c)
            for (a, b), k in zip(bounds, e):
                if k:
                    plo, phi = _ipow(a, b, k)
                    cands = (lo * plo, lo * phi, hi * plo, hi * phi)
                    lo, hi = min(cands), max(cands)
            lo_tot += lo
            hi_tot += hi
        # one ulp-ish of slack per term keeps the enclosure outward
        slack = 4 * np.finfo(float).eps * max(1.0, abs(lo_tot), abs(hi_tot)) * max(1, len(self._terms))
        return lo_tot - slack, hi_tot + slack

    # -- text ------------------------------------------------------------
    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        pieces = []
        for e, c in sorted(self._terms.items(), key=_display_key):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append(("-" if c < 0 else "+", body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {self.to_string()!r})"

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Polynomial":
        return parse_polynomial(text, nvars)


def _wdeg(e: Exponent, weights: Sequence[int]) -> int:
    return sum(k * w for k, w in zip(e, weights))


def _display_key(item):
    e, _ = item
    return (sum(e), tuple(-k for k in reversed(e)))


def _ipow(a: float, b: float, k: int) -> tuple[float, float]:
    if k % 2 == 1 or a >= 0:
        return a**k, b**k
    if b <= 0:
        return b**k, a**k
    return 0.0, max(a**k, b**k)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[a-zA-Z]+)(?P<idx>\d+)(?:\^(?P<exp>\d+))?|(?P<op>[-+*]))")


def parse_polynomial(text: str, nvars: int) -> Polynomial:
    """Parse the sparse text format; ``*`` between factors is optional."""
    pos = 0
    text = text.strip()
    total = Polynomial.zero(nvars)
    term: Polynomial | None = None
    sign = 1
    expect_factor = True

    def flush():
        nonlocal total, term
        if term is not None:
            total = total + term * sign

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        pos = m.end()
        if m.group("op") in ("+", "-"):
            if term is None and not expect_factor:
                raise ValueError("dangling operator")
            if term is not None:
                flush()
                term = None
                sign = 1
            if m.group("op") == "-":
                sign = -sign
            expect_factor = True
            continue
        if m.group("op") == "*":
            if term is None:
                raise ValueError("'*' without a left factor")
            expect_factor = True
            continue
        if m.group("num") is not None:
            factor = Polynomial.constant(Fraction(m.group("num")), nvars)
        else:
            i = int(m.group("idx")) - 1
            if not 0 <= i < nvars:
                raise ValueError(f"variable {m.group('var')}{i + 1} out of range for {nvars} variables")
            factor = Polynomial.variable(i, nvars) ** int(m.group("exp") or 1)
        term = factor if term is None else term * factor
        expect_factor = False
    if term is None:
        if expect_factor and text:
            raise ValueError("polynomial ends with an operator")
    flush()
    return total


def lcm_denominator(coeffs: Iterable[Fraction]) -> int:
    d = 1
    for c in coeffs:
        d = d * c.denominator // math.gcd(d, c.denominator)
    return d
