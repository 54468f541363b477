"""Surface measures of polynomial boundaries on ball-boxes, and Haar
volume scaling.

For E = {P <= 0} with smooth boundary and a left-invariant field Z,

    |Z 1_E|(B) = integral over dE cap B of |ZP| / |grad P| dH^{n-1}.

Writing dE as a graph x_d = g(x') over the remaining coordinates turns
this into an integral over the base box of |ZP| / |d_d P| evaluated on
the graph, which is what the quadrature below computes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import AlgVector, StratifiedAlgebra
from .fields import SublevelSet, apply_field, realize_left_invariant
from .group import GroupPoint, bch_product, identity
from .polynomial import Polynomial


class MeasureError(ValueError):
    pass


class NoAffineVariable(MeasureError):
    pass


class GraphExitsBox(MeasureError):
    def __init__(self, var: int, bound: tuple[float, float], width: float):
        self.var, self.bound, self.width = var, bound, width
        super().__init__(
            f"graph over x{var + 1} has range enclosure [{bound[0]:.6g}, {bound[1]:.6g}], "
            f"outside the half-width {width:.6g}")


@dataclass(frozen=True)
class BallBox:
    """Box of half-widths r^{w_i} around ``center`` (left-translated)."""

    center: GroupPoint
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise MeasureError("box radius must be positive")

    @property
    def algebra(self) -> StratifiedAlgebra:
        return self.center.algebra

    @property
    def half_widths(self) -> tuple[float, ...]:
        return tuple(float(self.r) ** w for w in self.algebra.weights)

    def bounds(self) -> list[tuple[float, float]]:
        return [(-h, h) for h in self.half_widths]

    def volume(self) -> float:
        return math.prod(2 * h for h in self.half_widths)


def ball_box(a: StratifiedAlgebra, r: float, center: GroupPoint | None = None) -> BallBox:
    return BallBox(center if center is not None else identity(a), float(r))


def translated_polynomial(E: SublevelSet, center: GroupPoint) -> Polynomial:
    """P(center . y) as a polynomial in y."""
    a = E.algebra
    if center.is_identity():
        return E.P
    y = GroupPoint(a, tuple(Polynomial.variable(i, a.dim) for i in range(a.dim)))
    moved = bch_product(a, center, y)
    return E.P.substitute(list(moved.coords), a.dim)


@dataclass
class GraphChart:
    """dE cap box as a graph over every coordinate but ``var``.

    ``explicit`` charts carry the exact solution ``g``; implicit ones solve
    P = 0 numerically along ``var``, which is certified monotone on the box.
    """

    var: int
    box: BallBox
    P: Polynomial
    mode: str
    g: Polynomial | None = None
    bound: tuple[float, float] | None = None
    contained: bool = True
    certificate: str = ""

    @property
    def base_vars(self) -> list[int]:
        return [i for i in range(self.P.nvars) if i != self.var]

    def to_dict(self) -> dict:
        return {
            "var": self.var + 1,
            "mode": self.mode,
            "g": None if self.g is None else self.g.to_string(),
            "bound": None if self.bound is None else list(self.bound),
            "contained": self.contained,
            "certificate": self.certificate,
        }


def _affine_candidates(P: Polynomial, weights: Sequence[int]) -> list[int]:
    cands = [i for i in range(P.nvars) if P.degree_in(i) == 1 and P.coefficient_in(i, 1).is_constant()]
    return sorted(cands, key=lambda i: (-weights[i], -i))


def graph_boundary(E: SublevelSet, box: BallBox, var: int | None = None,
                   allow_implicit: bool = True) -> GraphChart:
    """Chart for dE inside ``box`` (box coordinates are y with x = center . y).

    Explicit: the highest-layer variable in which P is affine with constant
    coefficient, solved exactly; containment of the graph in the box is
    checked by interval arithmetic.  When that graph leaves the box and no
    variable was forced, falls back to an implicit chart along the variable
    with the largest |d_d P(0)| h_d, certified monotone on the box.
    """
    a = E.algebra
    P = translated_polynomial(E, box.center)
    bounds = box.bounds()
    h = box.half_widths
    cands = _affine_candidates(P, a.weights)
    if var is not None:
        if var not in cands:
            raise NoAffineVariable(f"P is not affine with constant coefficient in x{var + 1}")
        cands = [var]
    exits = None
    for d in cands:
        c = P.coefficient_in(d, 1).constant_term()
        g = -P.coefficient_in(d, 0) / c
        base = [b if i != d else (0.0, 0.0) for i, b in enumerate(bounds)]
        lo, hi = g.interval(base)
        if -h[d] <= lo and hi <= h[d]:
            return GraphChart(d, box, P, "explicit", g, (lo, hi), True, "interval-containment")
        exits = GraphExitsBox(d, (lo, hi), h[d])
        break
    if var is not None or not allow_implicit:
        if exits is not None:
            raise exits
        raise NoAffineVariable("P is not affine with constant coefficient in any variable")
    return _implicit_chart(P, box, exits)


def _implicit_chart(P: Polynomial, box: BallBox, exits) -> GraphChart:
    bounds = box.bounds()
    h = box.half_widths
    grad0 = [float(P.diff(i).constant_term()) for i in range(P.nvars)]
    order = sorted(range(P.nvars), key=lambda i: -abs(grad0[i]) * h[i])
    for d in order:
        if grad0[d] == 0:
            break
        lo, hi = P.diff(d).interval(bounds)
        if lo > 0 or hi < 0:
            note = "" if exits is None else f"; explicit chart over x{exits.var + 1} leaves the box"
            return GraphChart(d, box, P, "implicit", None, None, True, f"monotone in x{d + 1} on the box{note}")
    raise MeasureError("no coordinate direction in which P is monotone on the box")


# -- quadrature ---------------------------------------------------------

def _gauss_nodes(bounds: Sequence[tuple[float, float]], order: int, subdiv: int):
    """Tensor Gauss-Legendre nodes/weights over a box, as flat arrays."""
    x, w = np.polynomial.legendre.leggauss(order)
    axes, weights = [], []
    for lo, hi in bounds:
        edges = np.linspace(lo, hi, subdiv + 1)
        half = (edges[1:] - edges[:-1]) / 2
        mid = (edges[1:] + edges[:-1]) / 2
        axes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        weights.append((half[:, None] * w[None, :]).ravel())
    if not axes:
        return [], np.ones(1)
    grids = np.meshgrid(*axes, indexing="ij")
    wgrid = weights[0]
    for wk in weights[1:]:
        wgrid = np.multiply.outer(wgrid, wk)
    return [g.ravel() for g in grids], wgrid.ravel()


def _solve_along(P: Polynomial, d: int, base: list[np.ndarray], lo: float, hi: float):
    """Roots of P = 0 along coordinate d in [lo, hi]; NaN where none."""
    f = P.lambdify()
    fd = P.diff(d).lambdify()

    def at(t):
        args = list(base)
        args.insert(d, t)
        return args

    m = base[0].shape[0] if base else 1
    a = np.full(m, lo)
    b = np.full(m, hi)
    fa, fb = f(*at(a)), f(*at(b))
    has = np.sign(fa) * np.sign(fb) <= 0
    t = np.where(np.abs(fb - fa) > 0, a - fa * (b - a) / np.where(fb == fa, 1, fb - fa), (a + b) / 2)
    t = np.clip(t, lo, hi)
    for _ in range(200):
        ft = f(*at(t))
        left = np.sign(ft) == np.sign(fa)
        a = np.where(left, t, a)
        fa = np.where(left, ft, fa)
        b = np.where(left, b, t)
        dt = fd(*at(t))
        newton = t - ft / np.where(dt == 0, np.inf, dt)
        inside = (newton > a) & (newton < b)
        t_new = np.where(inside, newton, (a + b) / 2)
        if np.all(np.abs(t_new - t) <= 1e-15 * max(1.0, abs(hi))):
            t = t_new
            break
        t = t_new
    return np.where(has, t, np.nan)


def _integrate(chart: GraphChart, numerator: Callable, order: int, subdiv: int) -> float:
    """Base-box quadrature of numerator / |d_d P| on the graph; ``numerator``
    is a vectorised function of the full coordinates."""
    P = chart.P
    d = chart.var
    bounds = chart.box.bounds()
    base_bounds = [bounds[i] for i in chart.base_vars]
    nodes, weights = _gauss_nodes(base_bounds, order, subdiv)
    if chart.mode == "explicit":
        t = chart.g.lambdify()(*_with(nodes, d, np.zeros_like(weights)))
    else:
        t = _solve_along(P, d, nodes, *bounds[d])
        if np.isnan(t).any():
            # part of the base has no boundary point inside the box: the
            # integrand has a cutoff and the error estimate is only indicative
            chart.contained = False
    full = _with(nodes, d, t)
    num = np.abs(numerator(*full))
    den = np.abs(P.diff(d).lambdify()(*full))
    vals = np.where(np.isnan(t), 0.0, num / np.where(np.isnan(t), 1.0, den))
    return float(np.sum(vals * weights))


def _with(nodes: list[np.ndarray], d: int, t: np.ndarray) -> list[np.ndarray]:
    out = list(nodes)
    out.insert(d, t)
    return out


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    error: float
    coarse: float
    chart: GraphChart

    def to_dict(self) -> dict:
        return {"estimate": self.value, "error": self.error, "chart": self.chart.to_dict()}


def _richardson(chart: GraphChart, numerator: Callable, order: int, subdiv: int) -> MeasureEstimate:
    fine = _integrate(chart, numerator, order, subdiv)
    coarse = _integrate(chart, numerator, order, max(1, subdiv // 2)) if subdiv > 1 else \
        _integrate(chart, numerator, max(2, order // 2), 1)
    floor = 64 * np.finfo(float).eps * abs(fine)
    return MeasureEstimate(fine, float(abs(fine - coarse) + floor), coarse, chart)


def _pulled_numerators(E: SublevelSet, chart: GraphChart, Zs: Sequence[AlgVector]) -> list[Polynomial]:
    a = E.algebra
    return [apply_field(realize_left_invariant(a, Z), chart.P) for Z in Zs]


def surface_measure(E: SublevelSet, Z: AlgVector, box: BallBox, order: int = 8, subdiv: int = 4,
                    chart: GraphChart | None = None) -> MeasureEstimate:
    """|Z 1_E|(box) by graph quadrature, with a two-level error estimate."""
    chart = chart or graph_boundary(E, box)
    (ZP,) = _pulled_numerators(E, chart, [Z])
    return _richardson(chart, ZP.lambdify(), order, subdiv)


def perimeter_measure(E: SublevelSet, box: BallBox, order: int = 8, subdiv: int = 4,
                      chart: GraphChart | None = None) -> MeasureEstimate:
    """|D 1_E|(box): the horizontal gradient norm sqrt(sum (X_i P)^2) in place of |ZP|."""
    a = E.algebra
    chart = chart or graph_boundary(E, box)
    comps = _pulled_numerators(E, chart, [a.basis(i) for i in a.layer_indices(1)])
    sq = Polynomial.zero(a.dim)
    for c in comps:
        sq = sq + c * c
    f = sq.lambdify()
    return _richardson(chart, lambda *xs: np.sqrt(np.maximum(f(*xs), 0.0)), order, subdiv)


# -- scans --------------------------------------------------------------

PERIMETER = "D"


@dataclass
class DensityRow:
    r: float
    estimate: float
    error: float
    slope: float | None = None
    constant: float | None = None


@dataclass
class DensityReport:
    label: str
    rows: list[DensityRow]

    @property
    def radii(self) -> list[float]:
        return [row.r for row in self.rows]

    @property
    def estimates(self) -> list[float]:
        return [row.estimate for row in self.rows]

    def to_dict(self) -> dict:
        return {"label": self.label, "rows": [vars(r).copy() for r in self.rows]}


def log2_slopes(radii: Sequence[float], values: Sequence[float]) -> list[float | None]:
    out: list[float | None] = [None]
    for (r0, v0), (r1, v1) in zip(zip(radii, values), zip(radii[1:], values[1:])):
        if v0 <= 0 or v1 <= 0:
            out.append(None)
        else:
            out.append(math.log2(v1 / v0) / math.log2(r1 / r0))
    return out


def _fill_slopes(rows: list[DensityRow]):
    slopes = log2_slopes([r.r for r in rows], [r.estimate for r in rows])
    if len(slopes) > 1:
        slopes[0] = slopes[1]
    for row, s in zip(rows, slopes):
        row.slope = s
        row.constant = None if s is None else row.estimate / row.r ** s


def density_scan(E: SublevelSet, targets: dict[str, AlgVector | str], radii: Sequence[float],
                 center: GroupPoint | None = None, order: int = 8, subdiv: int = 4) -> dict:
    """Run surface_measure (or perimeter_measure for the value ``"D"``)
    over ``radii`` for each named target; adds pairwise ratio slopes."""
    a = E.algebra
    reports: dict[str, DensityReport] = {}
    charts = {}
    for name, Z in targets.items():
        rows = []
        for r in radii:
            box = ball_box(a, r, center)
            chart = charts.get(r) or graph_boundary(E, box)
            charts[r] = chart
            est = perimeter_measure(E, box, order, subdiv, chart) if Z == PERIMETER else \
                surface_measure(E, Z, box, order, subdiv, chart)
            rows.append(DensityRow(float(r), est.value, est.error))
        _fill_slopes(rows)
        reports[name] = DensityReport(name, rows)
    ratios = {}
    names = list(reports)
    for i, p in enumerate(names):
        for q in names[i + 1:]:
            vals = [x / y if y > 0 else float("nan") for x, y in zip(reports[p].estimates, reports[q].estimates)]
            ratios[f"{p}/{q}"] = {"values": vals, "slopes": log2_slopes(list(radii), vals)}
    return {"reports": reports, "ratios": ratios, "charts": {r: c.to_dict() for r, c in charts.items()}}


def scan_to_csv(scan: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["target", "r", "estimate", "error", "slope", "constant"])
    for name, rep in scan["reports"].items():
        for row in rep.rows:
            w.writerow([name, repr(row.r), repr(row.estimate), repr(row.error),
                        "" if row.slope is None else repr(row.slope),
                        "" if row.constant is None else repr(row.constant)])
    return buf.getvalue()


def scan_to_dict(scan: dict) -> dict:
    return {
        "reports": {k: v.to_dict() for k, v in scan["reports"].items()},
        "ratios": scan["ratios"],
        "charts": {repr(r): c for r, c in scan["charts"].items()},
    }


# -- Haar scaling -------------------------------------------------------

@dataclass(frozen=True)
class HaarCheck:
    lam: Fraction
    expected: Fraction
    closed_form: Fraction
    mc_ratio: float
    mc_stderr: float
    samples: int
    seed: int

    @property
    def sigmas(self) -> float:
        return abs(self.mc_ratio - float(self.expected)) / self.mc_stderr if self.mc_stderr > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "lambda": str(self.lam),
            "expected": str(self.expected),
            "closed_form": str(self.closed_form),
            "mc_ratio": self.mc_ratio,
            "mc_stderr": self.mc_stderr,
            "sigmas": self.sigmas,
            "samples": self.samples,
            "seed": self.seed,
        }


def haar_scaling_check(a: StratifiedAlgebra, lam, lo: Sequence | None = None, hi: Sequence | None = None,
                       samples: int = 10**6, seed: int = 0,
                       region: Callable[[np.ndarray], np.ndarray] | None = None) -> HaarCheck:
    """Volume of delta_lam(A) over volume of A, for A the box [lo, hi]
    (or the subset of it picked out by ``region``).

    Both sets are sampled uniformly inside one bounding box with a common
    stream of points; the ratio of hit counts estimates the volume ratio and
    its standard error comes from the delta method.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise MeasureError("dilation factor must be positive")
    n = a.dim
    lo = [Fraction(-1)] * n if lo is None else [Fraction(v) for v in lo]
    hi = [Fraction(1)] * n if hi is None else [Fraction(v) for v in hi]
    if any(l >= h for l, h in zip(lo, hi)):
        raise MeasureError("box needs lo < hi in every coordinate")
    scale = [lam ** w for w in a.weights]
    vol = math.prod(h - l for l, h in zip(lo, hi))
    dvol = math.prod((h - l) * s for l, h, s in zip(lo, hi, scale))
    closed = dvol / vol

    flo = np.array([float(min(l, l * s)) for l, s in zip(lo, scale)])
    fhi = np.array([float(max(h, h * s)) for h, s in zip(hi, scale)])
    alo, ahi = np.array([float(v) for v in lo]), np.array([float(v) for v in hi])
    fs = np.array([float(s) for s in scale])

    def member(pts):
        inside = np.all((pts >= alo) & (pts <= ahi), axis=1)
        if region is not None:
            inside &= region(pts)
        return inside

    rng = np.random.default_rng(seed)
    s1 = s2 = s12 = 0
    batch = 1 << 17
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        pts = flo + (fhi - flo) * rng.random((m, n))
        i1 = member(pts)
        i2 = member(pts / fs)  # y in delta_lam(A) iff delta_{1/lam} y in A
        s1 += int(i1.sum())
        s2 += int(i2.sum())
        s12 += int((i1 & i2).sum())
        done += m
    N = samples
    p1, p2, p12 = s1 / N, s2 / N, s12 / N
    if p1 == 0:
        raise MeasureError("no samples landed in the base region; enlarge it or add samples")
    ratio = p2 / p1
    var1, var2, cov = p1 * (1 - p1), p2 * (1 - p2), p12 - p1 * p2
    var_r = (var2 / p1**2 + p2**2 * var1 / p1**4 - 2 * p2 * cov / p1**3) / N
    return HaarCheck(lam, lam ** a.homogeneous_dim, closed, ratio, math.sqrt(max(var_r, 0.0)), samples, seed)
