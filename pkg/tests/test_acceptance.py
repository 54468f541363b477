"""Acceptance checks, one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import properties  # noqa: E402
from oracles import engel_H, rand_q, rand_vec  # noqa: E402

from carnot import preset  # noqa: E402
from carnot.algebra import adjoint_exp  # noqa: E402
from carnot.blowup import provafis_probe, tangent_limit  # noqa: E402
from carnot.fields import apply_field, cone, halfspace, pab, parse_set, realize_left_invariant, rloca  # noqa: E402
from carnot.group import bch, bch_product, exp_point, identity, log_point, point  # noqa: E402
from carnot.measure import PERIMETER, ball_box, density_scan, haar_scaling_check, surface_measure  # noqa: E402
from carnot.polynomial import Polynomial  # noqa: E402
from carnot.span import classify_vertical_halfspace  # noqa: E402

X1, X2, X3, X4 = Polynomial.variables(4)
ZERO = Polynomial.zero(4)
ONE = Polynomial.constant(1, 4)
RADII = [2.0**-k for k in range(7)]
XBAR = [0, 1, 0, F(-1, 4)]
_elapsed: dict[str, float] = {}


def _Z(a):
    return a.basis(1) - a.basis(2) + a.basis(3) * F(1, 2)


# -- 1: exact symbolic reproduction --------------------------------------

def check_1a():
    a = preset("engel")
    want = [
        (ONE, ZERO, ZERO, ZERO),
        (ZERO, ONE, -X1, X1**2 / 2),
        (ZERO, ZERO, ONE, -X1),
        (ZERO, ZERO, ZERO, ONE),
    ]
    got = [realize_left_invariant(a, a.basis(j)).components for j in range(4)]
    return got == want, "; ".join(str(realize_left_invariant(a, a.basis(j))) for j in range(4))


def check_1b():
    rng = random.Random(101)
    ok = True
    for a in (preset("engel"), preset("engel-first")):
        for _ in range(100):
            x, y = rand_vec(a, rng), rand_vec(a, rng)
            H = engel_H(a, x, y)
            ok &= bch(a, x, y) == H
            if a.chart == "first":
                g = bch_product(a, point(a, x.coeffs), point(a, y.coeffs))
                ok &= g.coords == H.coeffs
            else:
                ok &= log_point(bch_product(a, exp_point(a, x), exp_point(a, y))) == H
    return ok, "100 pairs, both charts"


def check_1c():
    a = preset("engel")
    ad = adjoint_exp(a, a.basis(0), a.basis(1))
    ok = ad == _Z(a)
    detail = [str(ad)]
    for alpha in (F(1, 2), F(1), F(2)):
        ZP = apply_field(realize_left_invariant(a, ad), cone(a, alpha).P)
        ok &= ZP == 3 * alpha * X2**2 + (1 + X1) ** 2
    detail.append("ZP = 3a x2^2 + (1+x1)^2 for a in 1/2, 1, 2")
    return ok, "; ".join(detail)


def check_1d():
    a = preset("engel")
    ok = True
    for alpha in (F(1, 2), F(3, 4), F(2)):
        P = cone(a, alpha).P
        ok &= apply_field(realize_left_invariant(a, a.basis(0)), P).is_zero()
        ok &= apply_field(realize_left_invariant(a, a.basis(1)), P) == X1**2 + 3 * alpha * X2**2
    for av, bv in ((1, 0), (0, 1), (F(2, 3), F(-1, 5))):
        ok &= apply_field(realize_left_invariant(a, a.basis(1)), pab(a, av, bv).P) == av * X1**2 + bv * X1 + 1
    h = preset("heisenberg1")
    E = rloca(h)
    ok &= apply_field(realize_left_invariant(h, h.basis(0)), E.P) == 4 * Polynomial.variable(1, 3)
    ok &= apply_field(realize_left_invariant(h, h.basis(1)), E.P).is_zero()
    return ok, "cone, pab and Heisenberg derivatives"


# -- 2: property suites --------------------------------------------------

def check_2():
    counts = {name: fn() for name, fn in properties.ALL.items()}
    ok = counts["associativity"] >= 600 and counts["orbit-span"] >= 100
    return ok, ", ".join(f"{k}={v}" for k, v in counts.items())


# -- 3: Engel densities --------------------------------------------------

_scan_cache = {}


def _scan():
    if "scan" not in _scan_cache:
        a = preset("engel")
        _scan_cache["scan"] = density_scan(cone(a), {"Z": _Z(a), "D": PERIMETER}, RADII, order=8, subdiv=4)
    return _scan_cache["scan"]


def check_3a():
    D = _scan()["reports"]["D"]
    c = [row.estimate / row.r**6 for row in D.rows]
    spread = (max(c) - min(c)) / (sum(c) / len(c))
    return spread <= 1e-3 and min(c) > 0, f"|D1_C|(Q_r)/r^6 = {c[0]:.12g}, spread {spread:.2e}"


def check_3b():
    Z = _scan()["reports"]["Z"]
    c = [row.estimate / row.r**4 for row in Z.rows]
    dist = [abs(v - 4) for v in c]
    mono = all(d1 < d0 for d0, d1 in zip(dist, dist[1:]))
    return abs(c[-1] / 4 - 1) <= 0.05 and mono, f"|Z1_C|(Q_r)/r^4 at r=2^-6: {c[-1]:.6f}, monotone={mono}"


def check_3c():
    s = _scan()["ratios"]["Z/D"]["slopes"][-1]
    return -2.1 <= s <= -1.9, f"finest ratio slope {s:.5f}"


def check_3d():
    a = preset("engel")
    H = parse_set(a, "poly:x2")
    worst = max(abs(surface_measure(H, a.basis(1), ball_box(a, r)).value / (8 * r**6) - 1) for r in RADII)
    return worst <= 1e-10, f"max relative error {worst:.2e}"


# -- 4: Haar scaling -----------------------------------------------------

def check_4():
    a = preset("engel")
    h = haar_scaling_check(a, 2, samples=10**6, seed=0)
    ok = h.expected == 128 and h.closed_form == 128 and h.sigmas <= 3
    return ok, f"MC {h.mc_ratio:.3f} +- {h.mc_stderr:.3f} ({h.sigmas:.2f} sigma), closed form {h.closed_form}"


# -- 5: blow-ups and classification --------------------------------------

def check_5():
    a = preset("engel")
    C = cone(a)
    t0 = tangent_limit(C, identity(a))
    ok = t0.classification == "self-similar" and t0.order == 3 and t0.leading == C.P
    ok &= t0.family.expansion == {3: C.P}
    t1 = tangent_limit(C, point(a, XBAR))
    ok &= t1.classification == "halfspace" and t1.halfspace.nu_exact == (0, 1) and t1.halfspace.c_exact == 0
    # the horizontal normal of C at that point is (X1P, X2P)/|.| = (0, 1)
    nu_C = [apply_field(realize_left_invariant(a, a.basis(i)), C.P).evaluate(XBAR) for i in (0, 1)]
    ok &= nu_C[0] == 0 and nu_C[1] > 0
    rng = random.Random(55)
    exact = 0
    for _ in range(50):
        nu = [rand_q(rng), rand_q(rng)]
        while not any(nu):
            nu = [rand_q(rng), rand_q(rng)]
        c = rand_q(rng)
        spec = classify_vertical_halfspace(a, halfspace(a, c, nu)).halfspace
        if spec is None:
            continue
        k = next(d / v for d, v in zip(spec.direction, nu) if v)
        if k > 0 and list(spec.direction) == [v * k for v in nu] and spec.offset == c * k:
            exact += 1
    ok &= exact == 50
    res = classify_vertical_halfspace(a, pab(a, 1, 0))
    ok &= (not res.is_halfspace and res.constant_normal is not None and res.cone.is_cone is False)
    return ok, f"tangents ok, halfspaces recovered {exact}/50, pab:1,0 -> {res.diagnosis}"


# -- 6: higher-layer density probe ----------------------------------------

def check_6():
    a = preset("engel")
    C = cone(a)
    Zp = -a.basis(2) + a.basis(3) * F(1, 2)
    e = provafis_probe(C, Zp, identity(a), RADII)
    x = provafis_probe(C, Zp, point(a, XBAR), [2.0**-k for k in range(1, 8)])
    ok = e.slope <= -0.9 and x.slope >= 0.9
    return ok, f"slope at e {e.slope:.4f}, at (0,1,0,-1/4) {x.slope:.4f}"


CRITERIA = [
    ("1a", "Engel left-invariant fields exact", check_1a, None),
    ("1b", "Engel BCH product matches the step-3 closed form", check_1b, None),
    ("1c", "Ad_exp(X1)X2 and Z P_alpha exact", check_1c, None),
    ("1d", "horizontal derivatives of cone, pab and Heisenberg sets", check_1d, None),
    ("2", "seeded exact property suites", check_2, 30.0),
    ("3a", "cone perimeter density is c r^6", check_3a, None),
    ("3b", "|Z 1_C|(Q_r) / r^4 -> 4", check_3b, None),
    ("3c", "ratio slope ~ -2", check_3c, None),
    ("3d", "halfspace surface measure = 8 r^6", check_3d, None),
    ("4", "Haar volume scales by lambda^Q", check_4, None),
    ("5", "blow-ups and halfspace classification", check_5, None),
    ("6", "higher-layer density probe slopes", check_6, None),
]


def run_one(cid):
    _, title, fn, budget = next(c for c in CRITERIA if c[0] == cid)
    t = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t
    _elapsed[cid] = dt
    if budget is not None and dt > budget:
        ok, detail = False, f"{detail}; runtime {dt:.1f}s over {budget}s"
    line = f"[{'PASS' if ok else 'FAIL'}] {cid:>3}  {title}: {detail} ({dt:.2f}s)"
    return ok, line


@pytest.mark.parametrize("cid", [c[0] for c in CRITERIA])
def test_criterion(cid, capsys):
    ok, line = run_one(cid)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_runtime_budgets(capsys):
    groups = {"1": 5.0, "3": 60.0, "5": 5.0}
    lines, ok = [], True
    for g, budget in groups.items():
        ids = [c[0] for c in CRITERIA if c[0].startswith(g)]
        for cid in ids:
            if cid not in _elapsed:
                run_one(cid)
        total = sum(_elapsed[c] for c in ids)
        good = total < budget
        ok &= good
        lines.append(f"[{'PASS' if good else 'FAIL'}] {g:>3}  runtime {total:.2f}s (budget {budget:.0f}s)")
    with capsys.disabled():
        print("\n" + "\n".join(lines))
    assert ok


if __name__ == "__main__":
    failures = 0
    for cid, *_ in CRITERIA:
        ok, line = run_one(cid)
        failures += not ok
        print(line)
    sys.exit(1 if failures else 0)
