"""Shipped groups and the JSON group-spec format.

Spec files look like::

    {"name": "engel", "dim": 4, "layers": [1, 1, 2, 3],
     "brackets": {"1,2": {"3": "-1"}, "1,3": {"4": "-1"}},
     "coordinates": "second"}

Indices are 1-based, rationals are strings ``"p/q"``.  ``coordinates`` is
optional and defaults to ``"first"``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import AlgebraError, InvalidAlgebra, StratifiedAlgebra, validate_algebra


class SpecError(AlgebraError):
    """The group spec text could not be parsed."""


def abelian(n: int) -> StratifiedAlgebra:
    if n < 1:
        raise SpecError("abelian group needs n >= 1")
    return StratifiedAlgebra([1] * n, {}, name=f"abelian:{n}")


def heisenberg1() -> StratifiedAlgebra:
    """First Heisenberg group with [X1, X2] = -4 X3.

    In first-kind coordinates this realizes X1 = d1 + 2 x2 d3 and
    X2 = d2 - 2 x1 d3.
    """
    return StratifiedAlgebra([1, 1, 2], {(0, 1): {2: -4}}, name="heisenberg1")


def engel(chart: str = "second") -> StratifiedAlgebra:
    """Engel algebra: [X1, X2] = -X3, [X1, X3] = -X4.

    The default second-kind chart gives X1 = d1, X2 = d2 - x1 d3 + x1^2/2 d4,
    X3 = d3 - x1 d4, X4 = d4.
    """
    name = "engel" if chart == "second" else "engel-first"
    return StratifiedAlgebra([1, 1, 2, 3], {(0, 1): {2: -1}, (0, 2): {3: -1}}, name=name, chart=chart)


PRESET_NAMES = ("abelian:<n>", "heisenberg1", "engel", "engel-first")


def preset(name: str) -> StratifiedAlgebra:
    name = name.strip().lower()
    if name.startswith("abelian:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise SpecError(f"bad abelian preset {name!r}") from None
        return abelian(n)
    if name in ("heisenberg1", "heisenberg"):
        return heisenberg1()
    if name == "engel":
        return engel()
    if name == "engel-first":
        return engel("first")
    raise SpecError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")


def parse_group_spec(text: str) -> StratifiedAlgebra:
    """Parse a JSON group spec and validate it; raises on failure."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"group spec is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SpecError("group spec must be a JSON object")
    try:
        layers = [int(w) for w in data["layers"]]
        dim = int(data.get("dim", len(layers)))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"group spec needs an integer 'layers' list ({exc})") from None
    if dim != len(layers):
        raise SpecError(f"dim={dim} but {len(layers)} layers given")
    brackets = {}
    for key, row in (data.get("brackets") or {}).items():
        try:
            i, j = (int(p) - 1 for p in key.split(","))
            brackets[(i, j)] = {int(k) - 1: Fraction(str(c)) for k, c in row.items()}
        except (ValueError, AttributeError) as exc:
            raise SpecError(f"bad bracket entry {key!r}: {exc}") from None
    a = StratifiedAlgebra(layers, brackets, name=str(data.get("name", "")),
                          chart=str(data.get("coordinates", "first")))
    report = validate_algebra(a)
    if not report.ok:
        raise InvalidAlgebra(report)
    return a


def to_group_spec(a: StratifiedAlgebra) -> dict:
    brackets = {}
    for (i, j), row in sorted(a.structure_constants.items()):
        brackets[f"{i + 1},{j + 1}"] = {str(k + 1): str(c) for k, c in sorted(row.items())}
    return {
        "name": a.name,
        "dim": a.dim,
        "layers": list(a.weights),
        "brackets": brackets,
        "coordinates": a.chart,
    }


def load_group(ref: str) -> StratifiedAlgebra:
    """Preset name, or path to a JSON spec file."""
    try:
        return preset(ref)
    except SpecError:
        pass
    try:
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
    except OSError:
        raise SpecError(f"{ref!r} is neither a preset nor a readable spec file") from None
    return parse_group_spec(text)
