import csv
import json

import pytest

from dtmint.cli import main
from dtmint.scenarios import builtin, load_scenario


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_reproduce_example43(capsys, tmp_path):
    out_path = tmp_path / "rep.json"
    code, out, _ = run(capsys, "reproduce", "example43", "--out", str(out_path))
    assert code == 0
    body = json.loads(out)
    assert body["pass"] and "timing" not in body
    full = json.loads(out_path.read_text())
    assert "timing" in full and full["records"] == body["records"]
    by_name = {r["name"]: r for r in body["records"]}
    assert by_name["int f"]["actual"] == pytest.approx(-1, abs=0.02)


def test_reproduce_is_byte_identical(capsys):
    first = run(capsys, "reproduce", "example43")[1]
    second = run(capsys, "reproduce", "example43")[1]
    assert first == second


def test_coarse_reproduction_fails_with_exit_1(capsys):
    code, out, err = run(capsys, "reproduce", "example43", "--resolution", "16")
    assert code == 1
    assert not json.loads(out)["pass"] and "FAIL int f" in err


def test_reproduce_example30_flags_discrepancy(capsys):
    code, out, _ = run(capsys, "reproduce", "example30", "--resolution", "120")
    assert code == 0
    names = [r["name"] for r in json.loads(out)["records"]]
    assert any("tm_additive" in n for n in names)


@pytest.mark.parametrize("argv", [
    ["reproduce", "bogus"],
    ["reproduce", "example43", "--resolution", "2"],
    ["integrate", "--scenario", "zoo", "--measure", "nope", "--function", "f"],
    ["integrate", "--scenario", "zoo", "--measure", "mass", "--function", "nope(x)"],
    ["integrate", "--scenario", "zoo", "--measure", "mass", "--function", "f", "--region", "nope"],
    ["suite", "axioms", "--scenario", "/nonexistent.json"],
    ["suite", "axioms", "--scenario", "zoo", "--cases", "0"],
    ["classify", "--scenario", "zoo"],
    ["integrate", "--scenario", "zoo", "--measure", "mass", "--function", "f", "--emit-steps", "/nonexistent/dir/s.csv"],
])
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_integrate_cell_mass_is_weighted_sum(capsys, tmp_path):
    steps = tmp_path / "steps.csv"
    code, out, _ = run(capsys, "integrate", "--scenario", "zoo", "--measure", "mass", "--function", "f", "--emit-steps", str(steps))
    assert code == 0
    value = json.loads(out)["records"][0]["actual"]
    sc = builtin("zoo")
    m, f = sc.measure("mass"), sc.function("f")
    assert value == pytest.approx(float((m.weights * f.values).sum()), abs=1e-9)
    rows = list(csv.reader(steps.open()))
    assert rows[0][:3] == ["t_start", "t_end", "value"]


def test_integrate_zero_function_and_region(capsys):
    code, out, _ = run(capsys, "integrate", "--scenario", "zoo", "--measure", "solid_tm", "--function", "0")
    assert code == 0 and json.loads(out)["records"][0]["actual"] == 0
    code, out, _ = run(capsys, "integrate", "--scenario", "zoo", "--measure", "contain", "--function", "1", "--region", "D")
    assert code == 0 and json.loads(out)["records"][0]["actual"] == 1


def test_integrate_example43(capsys):
    code, out, _ = run(capsys, "integrate", "--scenario", "example43", "--measure", "mu", "--function", "f")
    assert code == 0
    assert json.loads(out)["records"][0]["actual"] == pytest.approx(-1, abs=0.02)


@pytest.mark.parametrize("measure,verdict", [("mass", "measure"), ("contain", "DTM, not TM")])
def test_classify(capsys, measure, verdict):
    code, out, err = run(capsys, "classify", "--scenario", "zoo", "--measure", measure, "--cases", "40", "--seed", "1")
    assert code == 0
    assert err.strip() == verdict
    body = json.loads(out)
    assert body["records"][-1]["actual"] == verdict


@pytest.mark.parametrize("suite", ["axioms", "theorem35", "convergence"])
def test_suite_runs_and_is_deterministic(capsys, suite):
    argv = ["suite", suite, "--scenario", "zoo", "--seed", "7", "--cases", "20"]
    code, out, _ = run(capsys, *argv)
    assert code == 0 and json.loads(out)["pass"]
    assert run(capsys, *argv)[1] == out


def test_extension_mode_override(capsys):
    base = ["integrate", "--scenario", "example30", "--resolution", "120", "--measure", "mu", "--function", "1", "--region", "C"]
    tm = json.loads(run(capsys, *base, "--extension-mode", "tm_additive")[1])["records"][0]["actual"]
    dtm = json.loads(run(capsys, *base, "--extension-mode", "dtm_inner_solid")[1])["records"][0]["actual"]
    assert (tm, dtm) == (1, 0)


def test_scenario_dump_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "scenario", "zoo")
    assert code == 0
    path = tmp_path / "zoo.json"
    path.write_text(out)
    sc, ref = load_scenario(str(path)), builtin("zoo")
    assert sorted(sc.measures) == sorted(ref.measures)
    for name in ref.measures:
        for r in ref.regions.values():
            assert sc.measure(name).eval(r) == ref.measure(name).eval(r)
    a = run(capsys, "suite", "axioms", "--scenario", str(path), "--seed", "2", "--cases", "10")
    b = run(capsys, "suite", "axioms", "--scenario", "zoo", "--seed", "2", "--cases", "10")
    assert a[0] == b[0] == 0
    assert json.loads(a[1])["records"] == json.loads(b[1])["records"]


def test_invalid_scenario_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "space": {"width": 4, "height": 4, "bounds": [0, 3, 0, 3]},
                                "measures": {"m": {"family": "containment", "region": "missing"}}}))
    assert run(capsys, "suite", "axioms", "--scenario", str(path))[0] == 2
    path.write_text("{not json")
    assert run(capsys, "suite", "axioms", "--scenario", str(path))[0] == 2
