import random
from fractions import Fraction as F

import pytest

from carnot import preset
from carnot.fields import SublevelSet, cone, halfspace, pab, parse_set, rloca
from carnot.span import (
    HalfspaceSpec, HypothesisError, NotSubalgebraError, SpanError, Subspace, ad_orbit_span,
    classify_vertical_halfspace, derived_invariants_step2, escape_hypotheses, find_escaping_adjoint,
    ideal_membership, invariance_certificates, invariant_directions, iterated_bracket_span,
)
from carnot.algebra import adjoint_exp, bracket
from carnot.polynomial import Polynomial
from oracles import dense_bracket, rand_q, rand_vec


def S(a, *idx):
    return Subspace.span(a, [a.basis(i) for i in idx])


def test_subspace_canonical(engel):
    X = [engel.basis(i) for i in range(4)]
    A = Subspace.span(engel, [X[0] + X[1], X[0] - X[1]])
    B = Subspace.span(engel, [X[1] * 3, X[0] * F(1, 2), X[0] + X[1]])
    assert A == B and A.dim == 2 and A.codim == 2
    assert A.contains(X[0]) and not A.contains(X[2])
    assert (A + S(engel, 2)).dim == 3
    assert A.intersect(Subspace.span(engel, [X[0] + X[2], X[1]])) == S(engel, 1)
    assert Subspace.full(engel).includes(A)
    assert S(engel, 2, 3).is_subalgebra() and not S(engel, 0, 1).is_subalgebra()
    assert S(engel, 0, 1).bracket_closure() == Subspace.full(engel)


def test_iterated_bracket_span(engel):
    assert iterated_bracket_span(engel, S(engel, 0), engel.basis(1)) == S(engel, 2, 3)
    assert iterated_bracket_span(engel, Subspace.zero(engel), engel.basis(1)).dim == 0
    assert iterated_bracket_span(engel, S(engel, 1), engel.basis(0)) == S(engel, 2)
    with pytest.raises(NotSubalgebraError):
        iterated_bracket_span(engel, S(engel, 0, 1), engel.basis(2))


def test_ad_orbit_span_examples(engel):
    assert ad_orbit_span(engel, S(engel, 0), engel.basis(1)) == S(engel, 1, 2, 3)
    assert ad_orbit_span(engel, Subspace.zero(engel), engel.basis(1)) == S(engel, 1)
    ab = preset("abelian:3")
    x = ab.basis(0) + ab.basis(2)
    assert ad_orbit_span(ab, Subspace.full(ab), x) == Subspace.span(ab, [x])


def test_escape_examples(engel):
    r = find_escaping_adjoint(engel, S(engel, 0), engel.basis(1))
    assert r.y == engel.basis(0)
    assert list(r.image.coeffs) == [0, 1, -1, F(1, 2)]
    assert any(r.residual)
    r = find_escaping_adjoint(engel, S(engel, 1), engel.basis(0))
    assert r.y == engel.basis(1) and list(r.image.coeffs) == [1, 0, 1, 0]
    with pytest.raises(HypothesisError) as exc:
        find_escaping_adjoint(engel, S(engel, 2, 3), engel.basis(0))
    assert exc.value.hypothesis == "generation"


def test_escape_hypothesis_order(engel):
    with pytest.raises(HypothesisError) as exc:
        find_escaping_adjoint(engel, S(engel, 0, 1), engel.basis(2))
    assert exc.value.hypothesis == "subalgebra"
    with pytest.raises(HypothesisError) as exc:
        find_escaping_adjoint(engel, S(engel, 0, 2, 3), engel.basis(1))
    assert exc.value.hypothesis == "dimension"
    h = escape_hypotheses(engel, S(engel, 0), engel.basis(0))
    assert not h["x_outside"]


def test_invariant_directions_examples(engel, heis):
    assert invariant_directions(engel, cone(engel)) == S(engel, 0)
    assert invariant_directions(engel, parse_set(engel, "poly:x2")) == S(engel, 0, 2, 3)
    assert invariant_directions(heis, rloca(heis)).contains(heis.basis(1))


def test_weak_invariance_certificate(heis):
    # X1 P = 4 x2 is not a multiple of P = x3 + 2 x1 x2; X2 P = 0 trivially is
    certs = invariance_certificates(heis, rloca(heis))
    assert certs[1]["identically_zero"] and certs[1]["in_ideal"]
    assert not certs[0]["identically_zero"] and certs[0]["in_ideal"] is False
    x1, x2, x3 = Polynomial.variables(3)
    P = x3 - x1 * x2
    assert ideal_membership(P, (x3 - x1 * x2) * (x1 + 5))
    assert not ideal_membership(P, x1)
    assert ideal_membership(x1**2 + x2**2 - 1, x1) is None


def test_classify_examples(engel):
    c = classify_vertical_halfspace(engel, parse_set(engel, "poly:x2 - 5"))
    assert c.halfspace == HalfspaceSpec((F(0), F(1)), F(5))
    assert c.halfspace.nu_exact == (0, 1) and c.halfspace.c_exact == 5
    c = classify_vertical_halfspace(engel, cone(engel))
    assert c.halfspace is None and "Inv0 codimension 3" in c.diagnosis
    c = classify_vertical_halfspace(engel, pab(engel, 0, 0))
    assert c.halfspace.direction == (0, 1) and c.halfspace.offset == 0


def test_classify_pab_constant_normal(engel):
    c = classify_vertical_halfspace(engel, pab(engel, 1, 0))
    assert not c.is_halfspace
    assert c.constant_normal.direction == (0, 1)
    assert c.normal_verdict.verdict == "positive"
    assert c.cone.is_cone is False
    y, lam = c.cone.witness, c.cone.scale
    P = pab(engel, 1, 0).P
    assert P.evaluate(y) <= 0 < P.evaluate([v * lam ** w for v, w in zip(y, engel.weights)])


def test_classify_orientation(engel):
    # {-x1 + 2 x2 <= 3}: outward normal points along (-1, 2)
    c = classify_vertical_halfspace(engel, halfspace(engel, 3, [-1, 2]))
    assert c.halfspace.direction == (-1, 2) and c.halfspace.offset == 3
    nu = c.halfspace.nu
    assert abs(nu[0] + 1 / 5**0.5) < 1e-15


def test_halfspace_spec_normalization():
    h = HalfspaceSpec.from_affine([F(0), F(-3), F(4)], F(10))
    assert h.direction == (0, -1, F(4, 3)) and h.offset == F(10, 3)
    assert h.nu_exact == (0, F(-3, 5), F(4, 5)) and h.c_exact == 2
    with pytest.raises(ValueError):
        HalfspaceSpec.from_affine([0, 0], 1)


def test_derived_invariants_step2(heis, engel):
    assert derived_invariants_step2(heis, S(heis, 1), heis.basis(0)) == S(heis, 1, 2)
    assert bracket(heis, heis.basis(1), heis.basis(0)) == heis.basis(2) * 4
    assert derived_invariants_step2(heis, Subspace.zero(heis), heis.basis(0)).dim == 0
    assert derived_invariants_step2(heis, S(heis, 0), heis.basis(1)) == S(heis, 0, 2)
    with pytest.raises(SpanError):
        derived_invariants_step2(engel, S(engel, 0), engel.basis(1))


def random_subalgebra(a, rng):
    k = rng.randint(0, a.dim - 1)
    vecs = [rand_vec(a, rng, 3, 2) for _ in range(k)]
    # sparsify so the closure is often proper
    vecs = [a.vector([c if rng.random() < 0.5 else 0 for c in v.coeffs]) for v in vecs]
    return Subspace.span(a, vecs).bracket_closure()


@pytest.mark.parametrize("name", ["engel", "engel-first", "heisenberg1", "abelian:3"])
def test_orbit_equals_x_plus_iterated(name):
    a = preset(name)
    rng = random.Random(hash(name) % 1000)
    for _ in range(30):
        g = random_subalgebra(a, rng)
        x = rand_vec(a, rng, 3, 2)
        orbit = ad_orbit_span(a, g, x, seed=rng.randint(0, 10**6))
        assert orbit == Subspace.span(a, [x]) + iterated_bracket_span(a, g, x)


def test_escape_never_exhausts():
    rng = random.Random(7)
    hits = 0
    for name in ("engel", "engel-first", "heisenberg1"):
        a = preset(name)
        for _ in range(80):
            g = random_subalgebra(a, rng)
            x = rand_vec(a, rng, 3, 2)
            if all(escape_hypotheses(a, g, x).values()):
                hits += 1
                r = find_escaping_adjoint(a, g, x, seed=rng.randint(0, 99))
                W = g + Subspace.span(a, [x])
                assert not W.contains(r.image) and g.contains(r.y)
                assert r.image == adjoint_exp(a, r.y, x)
    assert hits >= 10


def test_invariant_directions_bracket_closed(engel, heis):
    rng = random.Random(5)
    x = Polynomial.variables(4)
    for _ in range(40):
        P = sum((rand_q(rng, 3, 2) * m for m in [x[0], x[1], x[2], x[3], x[1] ** 2, x[0] * x[1], x[1] ** 3]
                 if rng.random() < 0.5), Polynomial.constant(rand_q(rng), 4))
        if P.is_constant():
            continue
        inv = invariant_directions(engel, SublevelSet(engel, P))
        assert inv.is_subalgebra()
        for u in inv.basis():
            for v in inv.basis():
                assert inv.contains(dense_bracket(engel, u, v))
