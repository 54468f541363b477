"""Command-line front end.

    carnot vf --group engel
    carnot mul --group abelian:3 1,2,3 4,5,6
    carnot classify --group engel --set pab:1,0 --json

Exit codes: 0 ok, 1 usage, 2 validation failure, 3 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .algebra import AlgebraError, InvalidAlgebra, validate_algebra
from .blowup import BlowupError, provafis_probe, tangent_limit, translate_dilate_pullback
from .fields import apply_field, parse_set, realize_left_invariant
from .group import (
    bch_product, conjugate, dilate_group, flow, format_coords, group_inverse, identity, parse_point, parse_vector,
)
from .measure import MeasureError, PERIMETER, density_scan, haar_scaling_check, scan_to_csv, scan_to_dict
from .nonneg import polynomial_nonneg
from .polynomial import as_fraction
from .presets import SpecError, load_group, to_group_spec
from .span import (
    HypothesisError, SearchExhausted, SpanError, Subspace, ad_orbit_span, classify_vertical_halfspace,
    find_escaping_adjoint, invariance_certificates, invariant_directions, iterated_bracket_span,
)

OK, USAGE, INVALID, FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class CommandFailed(Exception):
    def __init__(self, code: str, message: str, exit_code: int = FAILED, detail: dict | None = None):
        super().__init__(message)
        self.code, self.exit_code, self.detail = code, exit_code, detail or {}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fractions(text: str) -> list[Fraction]:
    try:
        return [as_fraction(p) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational list {text!r}: {exc}") from None


def _radii(text: str) -> list[float]:
    out = []
    for p in text.split(","):
        p = p.strip()
        if not p:
            continue
        if p.startswith("2^"):
            out.append(2.0 ** float(p[2:]))
        else:
            out.append(float(as_fraction(p)))
    if not out or any(r <= 0 for r in out):
        raise UsageError("radii must be positive")
    return out


def _subspace(a, text: str | None) -> Subspace:
    """Semicolon-separated vectors, e.g. ``1,0,0,0;0,0,1,0``; empty is {0}."""
    if not text or text.strip() in ("0", "{}", "zero"):
        return Subspace.zero(a)
    return Subspace.span(a, [parse_vector(a, v) for v in text.split(";") if v.strip()])


def _vec(v) -> list[str]:
    return [str(c) for c in v.coeffs]


# -- subcommands --------------------------------------------------------

def cmd_validate(a, args):
    report = validate_algebra(a)
    res = {"report": report.to_dict(), "spec": to_group_spec(a)}
    if not report.ok:
        raise CommandFailed("validation-failure", f"check failed: {report.first_failure}", INVALID, res)
    return res


def cmd_mul(a, args):
    g, h = parse_point(a, args.points[0]), parse_point(a, args.points[1])
    return {"product": format_coords(bch_product(a, g, h).coords)}


def cmd_inv(a, args):
    return {"inverse": format_coords(group_inverse(parse_point(a, args.point)).coords)}


def cmd_conj(a, args):
    k, g = parse_point(a, args.k), parse_point(a, args.g)
    return {"conjugate": format_coords(conjugate(k, g).coords)}


def cmd_dilate(a, args):
    lam = as_fraction(args.lam)
    return {"dilated": format_coords(dilate_group(lam, parse_point(a, args.point)).coords)}


def cmd_flow(a, args):
    g = parse_point(a, args.point)
    v = parse_vector(a, args.vector)
    return {"flow": format_coords(flow(g, v, as_fraction(args.t)).coords)}


def cmd_vf(a, args):
    if args.vector:
        return {"field": realize_left_invariant(a, parse_vector(a, args.vector)).to_string()}
    return {"fields": {f"X{j + 1}": realize_left_invariant(a, a.basis(j)).to_string() for j in range(a.dim)}}


def _need_set(a, args):
    if not args.set:
        raise UsageError("--set is required")
    try:
        return parse_set(a, args.set)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_deriv(a, args):
    E = _need_set(a, args)
    if args.vector:
        v = parse_vector(a, args.vector)
        d = apply_field(realize_left_invariant(a, v), E.P)
        return {"P": E.P.to_string(), "derivative": d.to_string(),
                "sign": polynomial_nonneg(d, seed=args.seed).to_dict()}
    out = {}
    for j in range(a.dim):
        d = apply_field(realize_left_invariant(a, a.basis(j)), E.P)
        out[f"X{j + 1}"] = {"derivative": d.to_string(), "sign": polynomial_nonneg(d, seed=args.seed).to_dict()}
    return {"P": E.P.to_string(), "derivatives": out}


def cmd_span(a, args):
    gp = _subspace(a, args.subspace)
    x = parse_vector(a, args.vector)
    it = iterated_bracket_span(a, gp, x)
    orbit = ad_orbit_span(a, gp, x, samples=args.samples, seed=args.seed)
    return {
        "iterated_bracket_span": it.to_dict(),
        "ad_orbit_span": orbit.to_dict(),
        "orbit_equals_x_plus_iterated": orbit == Subspace.span(a, [x]) + it,
    }


def cmd_escape(a, args):
    gp = _subspace(a, args.subspace)
    x = parse_vector(a, args.vector)
    try:
        return find_escaping_adjoint(a, gp, x, seed=args.seed).to_dict()
    except HypothesisError as exc:
        raise CommandFailed("hypothesis-failure", str(exc), FAILED,
                            {"failed": exc.hypothesis, "hypotheses": exc.hypotheses}) from None
    except SearchExhausted as exc:
        raise CommandFailed("search-exhausted", str(exc)) from None


def cmd_invariants(a, args):
    E = _need_set(a, args)
    inv = invariant_directions(a, E)
    return {"P": E.P.to_string(), "invariant_directions": inv.to_dict(), "codim": inv.codim,
            "bracket_closed": inv.is_subalgebra(), "certificates": invariance_certificates(a, E)}


def cmd_classify(a, args):
    E = _need_set(a, args)
    res = classify_vertical_halfspace(a, E, seed=args.seed)
    return {"P": E.P.to_string(), **res.to_dict()}


def _targets(a, text: str | None) -> dict:
    """``D`` for the perimeter, ``name=v1,..,vn`` for a field."""
    if not text:
        raise UsageError("--targets is required, e.g. 'D;Z=0,1,-1,1/2'")
    out = {}
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        if item == PERIMETER:
            out[item] = PERIMETER
            continue
        name, sep, vec = item.partition("=")
        if not sep:
            name, vec = item, item
        out[name.strip()] = parse_vector(a, vec)
    return out


def cmd_density(a, args):
    E = _need_set(a, args)
    center = parse_point(a, args.at) if args.at else identity(a)
    radii = _radii(args.radii or ",".join(f"2^-{k}" for k in range(7)))
    scan = density_scan(E, _targets(a, args.targets), radii, center, args.quad_order, args.subdiv)
    res = scan_to_dict(scan)
    res["_csv"] = scan_to_csv(scan)
    return res


def cmd_haar(a, args):
    lo = _fractions(args.lo) if args.lo else None
    hi = _fractions(args.hi) if args.hi else None
    chk = haar_scaling_check(a, as_fraction(args.lam), lo, hi, samples=args.mc_samples, seed=args.seed)
    res = chk.to_dict()
    tol = 3.0 if args.tol is None else args.tol
    res["tolerance_sigmas"] = tol
    res["pass"] = chk.closed_form == chk.expected and chk.sigmas <= tol
    if not res["pass"]:
        raise CommandFailed("haar-mismatch", "volume ratio outside tolerance", FAILED, res)
    return res


def cmd_blowup(a, args):
    E = _need_set(a, args)
    x = parse_point(a, args.at) if args.at else identity(a)
    res = {"P": E.P.to_string(), "at": format_coords(x.coords)}
    if args.r is not None:
        res["pullback"] = translate_dilate_pullback(E, x, as_fraction(args.r)).P.to_string(
            [f"y{i + 1}" for i in range(a.dim)])
    try:
        t = tangent_limit(E, x)
    except BlowupError as exc:
        raise CommandFailed("basepoint-not-on-boundary", str(exc), FAILED, res) from None
    res.update(t.to_dict())
    if args.probe:
        Z = parse_vector(a, args.probe)
        radii = _radii(args.radii or ",".join(f"2^-{k}" for k in range(7)))
        res["probe"] = provafis_probe(E, Z, x, radii, args.quad_order, args.subdiv).to_dict()
        if res["probe"]["tangent"] is not None:
            del res["probe"]["tangent"]
    return res


COMMANDS = {
    "validate": (cmd_validate, "validate the group's structure constants"),
    "mul": (cmd_mul, "group product of two points"),
    "inv": (cmd_inv, "group inverse"),
    "conj": (cmd_conj, "conjugate k g k^-1"),
    "dilate": (cmd_dilate, "intrinsic dilation"),
    "flow": (cmd_flow, "flow g exp(t v) of a left-invariant field"),
    "vf": (cmd_vf, "left-invariant vector fields"),
    "deriv": (cmd_deriv, "apply left-invariant fields to the defining polynomial"),
    "span": (cmd_span, "iterated-bracket and adjoint-orbit spans"),
    "escape": (cmd_escape, "find y with Ad_exp(y) x outside g' + Rx"),
    "invariants": (cmd_invariants, "invariant directions of a sublevel set"),
    "classify": (cmd_classify, "vertical-halfspace classification"),
    "density": (cmd_density, "box densities of surface measures"),
    "haar": (cmd_haar, "Haar volume scaling under dilation"),
    "blowup": (cmd_blowup, "tangent of a sublevel set at a boundary point"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--group", default="engel", help="preset name or JSON spec file (default: engel)")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--csv", action="store_true", help="CSV output (density)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--radii", help="comma-separated radii; 2^-k allowed")
    common.add_argument("--quad-order", type=int, default=8)
    common.add_argument("--subdiv", type=int, default=4)
    common.add_argument("--mc-samples", type=int, default=10**6)
    common.add_argument("--tol", type=float, default=None, help="numeric tolerance (haar: sigmas, default 3)")
    common.add_argument("--set", help="cone:a | pab:a,b | halfspace:c,nu.. | rloca | poly:<P>")
    common.add_argument("--at", help="base point, comma-separated rationals")

    p = _Parser(prog="carnot", description="Exact computations in Carnot groups.")
    p.add_argument("--version", action="version", version=f"carnot {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    sp = {name: sub.add_parser(name, parents=[common], help=h) for name, (_, h) in COMMANDS.items()}
    sp["mul"].add_argument("points", nargs=2)
    sp["inv"].add_argument("point")
    sp["conj"].add_argument("k")
    sp["conj"].add_argument("g")
    sp["dilate"].add_argument("lam")
    sp["dilate"].add_argument("point")
    sp["flow"].add_argument("point")
    sp["flow"].add_argument("vector")
    sp["flow"].add_argument("t")
    sp["vf"].add_argument("--vector")
    sp["deriv"].add_argument("--vector")
    for name in ("span", "escape"):
        sp[name].add_argument("--subspace", default="", help="g' as 'v1;v2;..' (empty: {0})")
        sp[name].add_argument("--vector", required=True)
    sp["span"].add_argument("--samples", type=int, default=8)
    sp["density"].add_argument("--targets", help="'D;Z=0,1,-1,1/2' (D is the perimeter)")
    sp["haar"].add_argument("--lambda", dest="lam", default="2")
    sp["haar"].add_argument("--lo")
    sp["haar"].add_argument("--hi")
    sp["blowup"].add_argument("--r", help="also print the normalized pullback at this scale")
    sp["blowup"].add_argument("--probe", help="vector Z for the higher-layer density probe")
    return p


def _emit_text(command: str, res: dict, out):
    def show(obj, indent=0):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, (dict, list)) and v and not all(isinstance(e, (str, int, float)) for e in v):
                    print(f"{pad}{k}:", file=out)
                    show(v, indent + 1)
                elif isinstance(v, list):
                    print(f"{pad}{k}: {', '.join(map(str, v))}", file=out)
                else:
                    print(f"{pad}{k}: {v}", file=out)
        elif isinstance(obj, list):
            for e in obj:
                if isinstance(e, dict):
                    show(e, indent)
                    print(file=out)
                else:
                    print(f"{pad}{e}", file=out)

    if command == "mul":
        print(",".join(res["product"]), file=out)
    elif command == "vf" and "fields" in res:
        for k, v in res["fields"].items():
            print(f"{k} = {v}", file=out)
    else:
        show(res)


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    doc = {
        "subcommand": args.command,
        "inputs": {"argv": argv, "group": args.group},
        "seed": args.seed,
        "version": __version__,
    }
    code = OK
    try:
        a = load_group(args.group)
        doc["inputs"]["group_spec"] = to_group_spec(a)
        fn = COMMANDS[args.command][0]
        doc["results"] = fn(a, args)
    except UsageError as exc:
        doc["error"] = {"code": "usage", "message": str(exc)}
        code = USAGE
    except InvalidAlgebra as exc:
        doc["error"] = {"code": "validation-failure", "message": str(exc), "report": exc.report.to_dict()}
        code = INVALID
    except CommandFailed as exc:
        doc["error"] = {"code": exc.code, "message": str(exc), **exc.detail}
        code = exc.exit_code
    except SpecError as exc:
        doc["error"] = {"code": "spec-error", "message": str(exc)}
        code = USAGE
    except (AlgebraError, SpanError, MeasureError, BlowupError, ArithmeticError, ValueError) as exc:
        doc["error"] = {"code": type(exc).__name__, "message": str(exc)}
        code = FAILED

    csv_text = doc.get("results", {}).pop("_csv", None) if isinstance(doc.get("results"), dict) else None
    if args.json:
        print(json.dumps(doc, sort_keys=True, indent=2, default=str), file=out)
    elif args.csv and csv_text is not None:
        out.write(csv_text)
    elif "error" in doc:
        print(f"error ({doc['error']['code']}): {doc['error']['message']}", file=err)
    else:
        _emit_text(args.command, doc["results"], out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
