from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from carnot.nonneg import INDEFINITE, NONNEGATIVE, POSITIVE, UNKNOWN, find_negative_point, polynomial_nonneg
from carnot.polynomial import Polynomial

x1, x2, x3, x4 = Polynomial.variables(4)


def test_cone_horizontal_derivative():
    v = polynomial_nonneg(x1**2 + F(3, 2) * x2**2)
    assert v.verdict == NONNEGATIVE and v.witness is None


def test_pab_positive():
    assert polynomial_nonneg(x1**2 + 1).verdict == POSITIVE


def test_linear_is_indefinite_with_witness():
    v = polynomial_nonneg(x1 + 1)
    assert v.verdict == INDEFINITE
    assert v.witness == (-2, 0, 0, 0)
    assert (x1 + 1).evaluate(v.witness) < 0


@pytest.mark.parametrize("p,verdict", [
    (Polynomial.constant(3, 4), POSITIVE),
    (Polynomial.zero(4), NONNEGATIVE),
    (Polynomial.constant(-1, 4), INDEFINITE),
    ((1 + x1) ** 2 + F(3, 2) * x2**2, NONNEGATIVE),  # discriminant rule
    (x1**2 - 2 * x1 * x2 + 2 * x2**2 + 1, POSITIVE),
    (x1**2 - x2**2, INDEFINITE),
])
def test_rules(p, verdict):
    assert polynomial_nonneg(p).verdict == verdict


def test_unknown_is_allowed():
    # Motzkin polynomial: nonnegative but not in any implemented certificate class
    m = x1**4 * x2**2 + x1**2 * x2**4 - 3 * x1**2 * x2**2 + 1
    assert polynomial_nonneg(m).verdict == UNKNOWN


def test_falsifier_finds_small_negative_region():
    p = (x1 - F(7, 2)) ** 2 + (x2 - 5) ** 2 - F(1, 100)
    w = find_negative_point(p, seed=3)
    assert w is not None and p.evaluate(w) < 0


coeff = st.fractions(min_value=-4, max_value=4, max_denominator=4)
monos = st.tuples(*[st.integers(0, 2)] * 2)
polys = st.dictionaries(monos, coeff, max_size=5).map(lambda d: Polynomial(2, d))


@settings(max_examples=80, deadline=None)
@given(polys)
def test_verdict_contract(p):
    v = polynomial_nonneg(p)
    if v.verdict == INDEFINITE:
        assert p.evaluate(v.witness) < 0
    if v.is_sign_definite():
        assert find_negative_point(p, seed=11) is None
