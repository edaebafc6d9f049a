import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given

from dglab.bv import bv_check, bv_to_dgla, d_delta_lemma_check, degeneration_solve, exp_tf_witness
from dglab.cartan import btt_certify, btt_relaxed
from dglab.cli import main
from dglab.derived import lietype_btt, lietype_check, lietype_dgla
from dglab.dgla import h_star_bracket
from dglab.fixtures import algebra_to_json, load, parse_algebra, resolve, shipped
from dglab.report import InputError

from strategies import valid_dgla

NAMES = [name for name, _ in shipped()]


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def run_json(argv):
    code, text = run(argv + ["--json"])
    return code, json.loads(text)


def _bicomplex_of(fx):
    return fx.bicomplex_obj() if fx.bicomplex is not None else fx.dbv_algebra().bicomplex


def library_facts(fx):
    """Each expectation key recomputed through the library, not the CLI."""
    out = {}
    exp = fx.expect
    if "h_star_bracket_zero" in exp:
        out["h_star_bracket_zero"] = h_star_bracket(fx.algebra()).abelian_cohomology
    if "degeneration" in exp:
        out["degeneration"] = degeneration_solve(_bicomplex_of(fx)).holds
    if "d_delta_lemma" in exp:
        out["d_delta_lemma"] = d_delta_lemma_check(_bicomplex_of(fx)).data["holds"]
    if "exp_tf" in exp:
        out["exp_tf"] = exp_tf_witness(fx.bicomplex_obj(), fx.map("f"))[1].passed
    if "bv" in exp:
        out["bv"] = bv_check(fx.dbv_algebra()).passed
    if "lietype" in exp:
        out["lietype"] = lietype_check(fx.split()).passed
    if "certified" in exp:
        out["certified"] = lietype_btt(fx.split()).verdict == "homotopy-abelian-certified"
    if "abelian" in exp:
        if fx.dbv is not None:
            out["abelian"] = bv_to_dgla(fx.dbv_algebra(), check=False).is_abelian()
        else:
            out["abelian"] = lietype_dgla(fx.split()).is_abelian()
    if "relaxed" in exp:
        out["relaxed"] = btt_relaxed(fx.calculus()).verdict
    if fx.scenario["command"] == "btt":
        out["verdict"] = btt_certify(fx.calculus()).verdict
    return out


@pytest.mark.parametrize("name", NAMES)
def test_scenario_matches_expectation(name):
    fx = load(resolve(name))
    exp = fx.expect
    code, rep = run_json(["run", name])
    assert code == exp["exit"]
    if "verdict" in exp:
        assert rep["verdict"] == exp["verdict"]
    if "failing" in exp:
        failed = [c["name"] for c in rep["checks"] if not c["passed"]]
        assert any(f.split(".")[-1] == exp["failing"] for f in failed), failed
    facts = library_facts(fx)
    for key, value in facts.items():
        assert value == exp.get(key, value), key


@pytest.mark.parametrize("name", NAMES)
def test_round_trip(name):
    fx = load(resolve(name))
    for nm, L in fx.algebras.items():
        M = parse_algebra(algebra_to_json(L), nm, "round trip")
        assert M.space.degrees == L.space.degrees and M.space.names == L.space.names
        assert np.all(M.table == L.table) and np.all(M.d.matrix == L.d.matrix)


@given(valid_dgla())
def test_round_trip_random(L):
    M = parse_algebra(json.loads(json.dumps(algebra_to_json(L))), "L", "random")
    assert np.all(M.table == L.table) and np.all(M.d.matrix == L.d.matrix)


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def _sl2_json():
    return json.loads(open(resolve("dgla_sl2")).read())


def test_unknown_key(tmp_path):
    d = _sl2_json()
    d["bogus"] = 1
    code, rep = run_json(["check", _write(tmp_path, "x.json", d)])
    assert code == 2 and rep["verdict"] == "input-error"
    assert "unknown keys" in rep["checks"][0]["detail"] and "bogus" in rep["checks"][0]["detail"]


@pytest.mark.parametrize("bad", ["1/0", "abc", "1.5.2"])
def test_bad_rational(tmp_path, bad):
    d = _sl2_json()
    d["bracket"][0][3] = bad
    code, rep = run_json(["check", _write(tmp_path, "x.json", d)])
    assert code == 2
    assert "bracket[0]" in rep["checks"][0]["detail"]


def test_wrong_degree_bracket(tmp_path):
    d = _sl2_json()
    d["space"]["degrees"] = [0, 1, 0]
    code, _ = run_json(["check", _write(tmp_path, "x.json", d)])
    assert code == 2


def test_missing_and_malformed(tmp_path):
    assert run(["check", str(tmp_path / "none.json")])[0] == 2
    assert run(["check", _write(tmp_path, "m.json", "{")])[0] == 2
    assert run(["check"])[0] == 2
    assert run(["frobnicate", "dgla_sl2"])[0] == 2


def test_wrong_structure_for_command():
    code, rep = run_json(["bv", "check", "dgla_sl2"])
    assert code == 2 and rep["verdict"] == "input-error"


def test_resolve_rejects_unknown():
    with pytest.raises(InputError):
        resolve("no_such_fixture_anywhere")


def test_verbosity_levels(monkeypatch):
    outs = {}
    for v in ("0", "1", "2"):
        monkeypatch.setenv("DGLAB_VERBOSITY", v)
        outs[v] = run(["btt", "btt_sl2"])[1]
    assert len(outs["0"]) < len(outs["1"]) < len(outs["2"])
    assert "1_cartan_homotopy" in outs["1"] and "1_cartan_homotopy" not in outs["0"]
    assert "4_i_injective_on_cohomology" in outs["0"]
    assert "data:" in outs["2"] and "data:" not in outs["1"]
    monkeypatch.setenv("DGLAB_VERBOSITY", "junk")
    assert run(["btt", "btt_sl2"])[1] == outs["1"]


def test_list():
    code, text = run(["list"])
    assert code == 0
    assert [ln.split()[0] for ln in text.splitlines()] == NAMES
    code, rep = run_json(["list"])
    assert sorted(rep["data"]) == NAMES


def test_subcommands_smoke():
    assert run(["cohomology", "dgla_abelian"])[0] == 0
    assert run(["btt-relaxed", "btt_sl2"])[0] == 0
    assert run(["coder", "q2", "dgla_sl2"])[0] == 0
    assert run(["coder", "split", "dgla_sl2"])[0] == 1
    assert run(["coder", "q2", "dgla_broken_jacobi"])[0] == 1
    assert run(["bv", "dgla", "dbv_tensor_acyclic"])[0] == 0
    assert run(["bv", "lemma", "bicomplex_square"])[0] == 0
    assert run(["bv", "exp", "bicomplex_exp_jordan"])[0] == 0
    assert run(["lietype", "dgla", "pi_nonabelian"])[0] == 0
    assert run(["mc", "mc_toy_obstructed", "--order", "2"])[0] == 1
    assert run(["fiber", "fiber_sl2_gl2", "--order", "2"])[0] == 0


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "dglab", "run", "dgla_sl2", "--json"],
                       capture_output=True, text=True, check=False)
    assert p.returncode == 0
    assert json.loads(p.stdout)["passed"] is True
