"""Independent reference computations used only by the tests.

The BCH oracle works in the truncated free associative algebra on X, Y:
it forms log(exp(X) exp(Y)) as a power series, then maps each word to a Lie
element with the Dynkin-Specht-Wever projection and evaluates the nested
brackets in the target algebra.  It shares no code with the Dynkin-series
implementation under test.
"""

from collections import defaultdict
from fractions import Fraction
from math import factorial
import random

from carnot.algebra import AlgVector, bracket


def _mul(p, q, maxdeg):
    out = defaultdict(Fraction)
    for u, a in p.items():
        for v, b in q.items():
            if len(u) + len(v) <= maxdeg:
                out[u + v] += a * b
    return {w: c for w, c in out.items() if c}


def _exp_letter(letter, maxdeg):
    return {(letter,) * k: Fraction(1, factorial(k)) for k in range(maxdeg + 1)}


def free_log_exp_exp(maxdeg):
    """Words -> coefficients of log(e^X e^Y) truncated at ``maxdeg``."""
    prod = _mul(_exp_letter("X", maxdeg), _exp_letter("Y", maxdeg), maxdeg)
    w = {k: c for k, c in prod.items() if k}  # e^X e^Y - 1
    out = defaultdict(Fraction)
    power = {(): Fraction(1)}
    for k in range(1, maxdeg + 1):
        power = _mul(power, w, maxdeg)
        for word, c in power.items():
            out[word] += Fraction((-1) ** (k + 1), k) * c
    return {k: c for k, c in out.items() if c}


def bch_oracle(a, x, y):
    words = free_log_exp_exp(a.step)
    total = a.zero()
    letters = {"X": x, "Y": y}
    for word, c in words.items():
        # Dynkin-Specht-Wever: w1..wn -> (1/n) [...[[w1, w2], w3], ..., wn]
        v = letters[word[0]]
        for ch in word[1:]:
            v = bracket(a, v, letters[ch])
        total = total + v * (c / len(word))
    return total


def dense_bracket(a, u, v):
    """[u, v] from the full antisymmetric table, by brute-force double sum."""
    n = a.dim
    out = [Fraction(0)] * n
    for i in range(n):
        for j in range(n):
            if u[i] and v[j]:
                for k in range(n):
                    out[k] += u[i] * v[j] * a.constant(k, i, j)
    return AlgVector(a, tuple(out))


def rand_q(rng: random.Random, span=5, den=4):
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def rand_vec(a, rng, span=5, den=4):
    return a.vector([rand_q(rng, span, den) for _ in range(a.dim)])


def engel_H(a, x, y):
    """X + Y + 1/2 [X,Y] + 1/12 ([X,[X,Y]] - [Y,[X,Y]]) with the oracle bracket."""
    xy = dense_bracket(a, x, y)
    return x + y + xy * Fraction(1, 2) + (dense_bracket(a, x, xy) - dense_bracket(a, y, xy)) * Fraction(1, 12)


def second_kind_to_first(a, coords):
    """log(exp(x_n X_n) ... exp(x_1 X_1)) through the free-algebra BCH."""
    z = a.zero()
    for i in reversed(range(a.dim)):
        z = bch_oracle(a, z, a.basis(i) * coords[i])
    return z
