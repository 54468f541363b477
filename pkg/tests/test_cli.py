import io
import json

import pytest

from carnot import preset
from carnot.cli import run
from carnot.presets import PRESET_NAMES, SpecError, parse_group_spec, to_group_spec
from carnot.algebra import InvalidAlgebra


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_vf_engel():
    code, out, _ = call("vf", "--group", "engel")
    assert code == 0
    assert out.splitlines() == ["X1 = d1", "X2 = d2 - x1*d3 + 1/2*x1^2*d4", "X3 = d3 - x1*d4", "X4 = d4"]


def test_mul_abelian():
    code, out, _ = call("mul", "--group", "abelian:3", "1,2,3", "4,5,6")
    assert code == 0 and out.strip() == "5,7,9"


def test_classify_pab_json():
    code, out, _ = call("classify", "--group", "engel", "--set", "pab:1,0", "--json")
    assert code == 0
    doc = json.loads(out)
    res = doc["results"]
    assert res["is_halfspace"] is False
    assert res["constant_normal"]["direction"] == ["0", "1"]
    assert res["normal_verdict"]["verdict"] == "positive"
    assert res["cone"]["is_cone"] is False
    assert doc["subcommand"] == "classify" and doc["seed"] == 0 and "version" in doc


def test_json_is_deterministic():
    args = ("span", "--subspace", "1,0,0,0", "--vector", "0,1,0,0", "--seed", "4", "--json")
    assert call(*args)[1] == call(*args)[1]
    res = json.loads(call(*args)[1])["results"]
    assert res["orbit_equals_x_plus_iterated"] is True


def test_exit_codes(tmp_path):
    assert call("bogus")[0] == 1
    assert call("mul", "--group", "engel", "1,2")[0] == 1
    assert call("vf", "--group", "nope")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 3, "layers": [1, 1, 2], "brackets": {}}))
    code, out, _ = call("validate", "--group", str(bad), "--json")
    assert code == 2
    assert json.loads(out)["error"]["report"]["checks"]["generation"] is False
    code, out, _ = call("escape", "--subspace", "0,0,1,0;0,0,0,1", "--vector", "1,0,0,0", "--json")
    assert code == 3 and json.loads(out)["error"]["failed"] == "generation"
    assert call("blowup", "--set", "cone:1/2", "--at", "0,1,0,0")[0] == 3


def test_spec_files(tmp_path):
    spec = {"dim": 4, "layers": [1, 1, 2, 3], "brackets": {"1,2": {"3": "-1"}, "1,3": {"4": "-1"}}}
    a = parse_group_spec(json.dumps(spec))
    assert a.homogeneous_dim == 7
    assert parse_group_spec(json.dumps({"dim": 2, "layers": [1, 1], "brackets": {}})).homogeneous_dim == 2
    h = parse_group_spec(json.dumps({"dim": 3, "layers": [1, 1, 2], "brackets": {"1,2": {"3": "-4"}}}))
    assert h.homogeneous_dim == 4 and h == preset("heisenberg1")
    with pytest.raises(SpecError):
        parse_group_spec("{not json")
    with pytest.raises(InvalidAlgebra):
        parse_group_spec(json.dumps({"dim": 3, "layers": [1, 1, 2], "brackets": {}}))
    f = tmp_path / "engel.json"
    f.write_text(json.dumps(spec))
    code, out, _ = call("validate", "--group", str(f), "--json")
    assert code == 0 and json.loads(out)["results"]["report"]["homogeneous_dim"] == 7


@pytest.mark.parametrize("name", ["abelian:2", "heisenberg1", "engel", "engel-first"])
def test_roundtrip(name):
    a = preset(name)
    assert parse_group_spec(json.dumps(to_group_spec(a))) == a


def test_other_subcommands():
    assert call("inv", "--group", "engel-first", "1,2,3,4")[1].strip().endswith("-1, -2, -3, -4")
    assert call("conj", "--group", "abelian:2", "1,1", "2,3", "--json")[0] == 0
    code, out, _ = call("dilate", "--group", "engel", "2", "1,1,1,1", "--json")
    assert json.loads(out)["results"]["dilated"] == ["2", "2", "4", "8"]
    code, out, _ = call("flow", "--group", "abelian:2", "1,1", "1,0", "1/2", "--json")
    assert json.loads(out)["results"]["flow"] == ["3/2", "1"]
    code, out, _ = call("deriv", "--set", "cone:1/2", "--vector", "0,1,-1,1/2", "--json")
    assert json.loads(out)["results"]["derivative"] == "1 + 2*x1 + 3/2*x2^2 + x1^2"
    code, out, _ = call("invariants", "--set", "poly:x2", "--json")
    assert json.loads(out)["results"]["codim"] == 1
    code, out, _ = call("blowup", "--set", "cone:1/2", "--at", "0,1,0,-1/4", "--json")
    res = json.loads(out)["results"]
    assert res["classification"] == "halfspace" and res["expansion"]["1"] == "3/2*y2"


def test_density_and_haar_cli():
    code, out, _ = call("density", "--set", "cone:1/2", "--targets", "D", "--radii", "1,1/2", "--csv")
    assert code == 0 and out.splitlines()[0].startswith("target,r")
    code, out, _ = call("haar", "--group", "heisenberg1", "--lambda", "3", "--mc-samples", "100000", "--json")
    assert code == 0 and json.loads(out)["results"]["closed_form"] == "81"
