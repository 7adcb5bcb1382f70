import csv
import io
import json
import subprocess
import sys

import pytest

from polarity_kit.cli import bundled_scenarios, main, parse_slice, InputError


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj), encoding="utf-8")
        return str(p)
    return write


def test_polar_of_square_body(files):
    code, text = run(["polar", "--body", files("sq.json", {"named": "square"})])
    assert code == 0
    pts = json.loads(text)["polar"]["points"]
    assert sorted(map(tuple, pts)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_polar_of_abs_samples(files):
    f = files("abs.json", {"variant": "norm", "p": 1, "dim": 1})
    g = files("g.json", {"lo": -2, "hi": 2, "step": "1/2"})
    code, text = run(["polar", "--func", f, "--dual-grid", g])
    assert code == 0
    obj = json.loads(text)
    assert obj["values"] == [2, "3/2", 1, "1/2", 0, "1/2", 1, "3/2", 2]


def test_polar_csv(files):
    f = files("abs.json", {"variant": "norm", "p": 1, "dim": 1})
    g = files("g.json", {"lo": -1, "hi": 1, "step": 1})
    code, text = run(["polar", "--func", f, "--dual-grid", g, "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["x1", "value"]
    assert rows[1:] == [["-1", "1"], ["0", "0"], ["1", "1"]]


def test_malformed_json_exits_2_with_location(files, capsys):
    code, _ = run(["polar", "--body", files("bad.json", '{"named": "square",,}')])
    assert code == 2
    assert "bad.json:1:" in capsys.readouterr().err


def test_bad_field_exits_2_with_path(files, capsys):
    code, _ = run(["polar", "--body", files("b.json", {"points": [[0, "q"]]})])
    assert code == 2
    assert "points[0][1]" in capsys.readouterr().err


def test_unknown_command_exits_2():
    assert run(["frobnicate"])[0] == 2


def test_conjugate(files):
    f = files("ind.json", {"variant": "indicator", "body": {"points": [[-1], [1]]}})
    g = files("g.json", {"lo": -1, "hi": 1, "step": 1})
    code, text = run(["conjugate", "--func", f, "--dual-grid", g, "--primal-grid", g])
    assert code == 0
    assert json.loads(text)["values"] == [1, 0, 1]


def test_bundled_scenarios_listed():
    names = bundled_scenarios()
    assert {"catalog-square", "non-bipolar", "tolerance-demo"} <= set(names)
    code, text = run(["scenarios"])
    assert code == 0 and text.split() == names


def test_verify_square_passes(tmp_path):
    out = tmp_path / "report.json"
    code, _ = run(["verify", "catalog-square", "-o", str(out)])
    assert code == 0
    rep = json.loads(out.read_text(encoding="utf-8"))
    assert rep["schema"] == 1 and rep["pass"] is True
    assert rep["checks"] == sorted(rep["checks"], key=lambda c: (c["equation"], c["instance"]))


def test_verify_non_bipolar_names_certificate(capsys):
    code, text = run(["verify", "non-bipolar"])
    assert code == 1
    err = capsys.readouterr().err
    assert "FAIL support:precondition" in err
    assert "contains_zero" in err


def test_verify_tolerance_zero_reports_discrepancy(capsys):
    code, _ = run(["verify", "tolerance-demo"])
    assert code == 1
    err = capsys.readouterr().err
    line = next(ln for ln in err.splitlines() if "sup-form " in ln or "sup-form [" in ln)
    assert "> tolerance 0" in line
    assert float(line.split("discrepancy ")[1].split()[0]) > 0


def test_verify_is_deterministic_across_runs():
    a = run(["verify", "lattice-random", "--seed", "7"])
    b = run(["verify", "lattice-random", "--seed", "7"])
    assert a == b
    assert json.loads(a[1])["seed"] == 7


def test_verify_unknown_scenario(capsys):
    assert run(["verify", "no-such-scenario"])[0] == 2
    assert "bundled" in capsys.readouterr().err


def test_verify_csv():
    code, text = run(["verify", "catalog-square", "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["equation", "instance", "max_discrepancy", "tolerance", "pass"]
    assert all(r[4] == "True" for r in rows[1:])


def test_lattice_command(files):
    P = files("P.json", {"named": "square"})
    Q = files("Q.json", {"points": [[0, 0], [2, 1], [-1, 3]]})
    code, text = run(["lattice", P, Q])
    assert code == 0
    obj = json.loads(text)
    assert obj["pass"] is True and "meet" in obj and "join" in obj


def test_lattice_rejects_non_bipolar(files, capsys):
    P = files("P.json", {"named": "square"})
    Q = files("Q.json", {"points": [[1, 1], [2, 2]]})
    assert run(["lattice", P, Q])[0] == 2
    assert "contains_zero" in capsys.readouterr().err


def test_subdiff_command(files):
    f = files("abs.json", {"variant": "norm", "p": 1, "dim": 1})
    g = files("g.json", {"lo": -1, "hi": 1, "step": "1/2"})
    code, text = run(["subdiff", "--func", f, "--primal-grid", g, "--x", "0"])
    assert code == 0
    obj = json.loads(text)
    assert obj["lower"] == [[0]]
    assert len(obj["upper"]) == 5 and len(obj["middle"]) == 5
    code, text = run(["subdiff", "--func", f, "--primal-grid", g, "--x", "1", "--kind", "upper"])
    assert json.loads(text)["upper"] == [["1/2"], [1]]


def test_subdiff_bad_point(files, capsys):
    f = files("abs.json", {"variant": "norm", "p": 1, "dim": 1})
    g = files("g.json", {"lo": -1, "hi": 1, "step": "1/2"})
    assert run(["subdiff", "--func", f, "--primal-grid", g, "--x", "1/3"])[0] == 2
    assert run(["subdiff", "--func", f, "--primal-grid", g, "--x", "1,0"])[0] == 2
    assert run(["subdiff", "--func", f, "--primal-grid", g, "--x", "abc"])[0] == 2


def test_approx_command(files):
    w = files("w.json", {"variant": "min", "of": [
        {"variant": "max-affine", "pieces": [[1, -1], [-1, 1]]},
        {"variant": "max-affine", "pieces": [[1, 1], [-1, -1]]}]})
    g = files("g.json", {"lo": -3, "hi": 3, "step": 1})
    code, text = run(["approx", "--func", w, "--grid", g])
    assert code == 0
    assert json.loads(text)["values"] == [2, 1, 0, 0, 0, 1, 2]
    q = files("q.json", {"variant": "quadratic"})
    code, text = run(["approx", "--func", q, "--grid", g, "--kind", "homogeneous"])
    assert json.loads(text)["values"] == [0] * 7
    code, text = run(["approx", "--func", q, "--grid", g, "--kind", "oracle"])
    assert json.loads(text)["truncated"] is False


def test_plot_data_abs_with_bipolar_overlay(files):
    f = files("abs.json", {"variant": "norm", "p": 1, "dim": 1})
    g = files("g.json", {"lo": -2, "hi": 2, "step": 1})
    code, text = run(["plot-data", "--func", f, "--grid", g, "--overlay", "bipolar"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["x1", "f", "f_bipolar"]
    assert all(r[1] == r[2] for r in rows[1:])
    assert len(rows) == 6


def test_plot_data_slice_of_max_norm(files):
    f = files("m.json", {"variant": "minkowski", "body": "square"})
    g = files("g.json", {"lo": -1, "hi": 1, "step": 1, "dim": 2})
    code, text = run(["plot-data", "--func", f, "--grid", g, "--slice", "x1=*,x2=1"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows == [["x1", "f"], ["-1", "1"], ["0", "1"], ["1", "1"]]
    code, text = run(["plot-data", "--func", f, "--grid", g])
    assert len(text.splitlines()) == 10


def test_plot_data_empty_slice_is_header_only(files):
    f = files("m.json", {"variant": "minkowski", "body": "square"})
    g = files("g.json", {"lo": -1, "hi": 1, "step": 1, "dim": 2})
    code, text = run(["plot-data", "--func", f, "--grid", g, "--slice", "*,1/2",
                      "--overlay", "polar"])
    assert code == 0
    assert text == "x1,f,f_polar\n"


def test_plot_data_errors(files):
    f = files("m.json", {"variant": "minkowski", "body": "square"})
    g1 = files("g1.json", {"lo": -1, "hi": 1, "step": 1})
    g = files("g.json", {"lo": -1, "hi": 1, "step": 1, "dim": 2})
    assert run(["plot-data", "--func", f, "--grid", g1])[0] == 2
    assert run(["plot-data", "--func", f, "--grid", g, "--slice", "*"])[0] == 2
    assert run(["plot-data", "--func", f, "--grid", g, "--overlay", "fancy"])[0] == 2


def test_parse_slice():
    assert parse_slice("*,0", 2) == ([None, 0], [0])
    assert parse_slice(None, 2) == ([None, None], [0, 1])
    with pytest.raises(InputError):
        parse_slice("*,*,*", 3)
    with pytest.raises(InputError):
        parse_slice("x2=*,0", 2)


def test_float_flag(files):
    f = files("abs.json", {"variant": "norm", "p": 1, "dim": 1})
    g = files("g.json", {"lo": -1, "hi": 1, "step": "1/2"})
    code, text = run(["polar", "--func", f, "--dual-grid", g, "--float"])
    assert code == 0
    assert json.loads(text)["values"] == [1.0, 0.5, 0.0, 0.5, 1.0]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "polarity_kit.cli", "--version"],
                       capture_output=True, text=True)
    assert p.returncode == 0
    assert p.stdout.strip().startswith("polarity-kit")
