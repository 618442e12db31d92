import json
import subprocess
import sys

import pytest

from troplib.cli import run

CIRCLE = {
    "vertices": ["a", "b"],
    "edges": [{"tail": "a", "head": "b", "length": "1/2"}, {"tail": "b", "head": "a", "length": "1/2"}],
}
SQUARE = {"n": 2, "M": [["1", "0"], ["0", "1"]]}
SQUARE_POL = {"torus": SQUARE, "A": [[1, 0], [0, 1]]}


@pytest.fixture
def files(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return write


def call(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_tripod_pipeline(tmp_path, capsys):
    tripod = str(tmp_path / "tripod.json")
    assert call(["trop-hypersurface", "x+y+1", "--out", tripod], capsys)[0] == 0
    code, out, _ = call(["balance-check", tripod], capsys)
    assert code == 0 and json.loads(out)["balanced"]
    code, out, _ = call(["render", tripod], capsys)
    assert code == 0 and out.count("<line") == 3 and out.count("<circle") == 1


def test_lin_equiv_exit_codes(files, capsys):
    g = files("circle.json", CIRCLE)
    d1 = files("d1.json", [{"point": {"edge": 0, "offset": "1/10"}, "mult": 1}])
    d2 = files("d2.json", [{"point": {"edge": 0, "offset": "7/20"}, "mult": 1}])
    code, out, _ = call(["lin-equiv", g, d1, d2], capsys)
    assert code == 1
    assert json.loads(out) == {"result": "NotEquivalent", "abel_jacobi_lift": ["-1/4"]}
    code, out, _ = call(["lin-equiv", g, d1, d1, "--method", "chip-firing"], capsys)
    assert code == 0 and json.loads(out)["result"] == "Equivalent"


def test_period_matrix_and_abel_jacobi(files, capsys):
    g = files("circle.json", CIRCLE)
    code, out, _ = call(["period-matrix", g], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["matrix"] == [["1"]] and data["det_sign"] == "Positive"
    d = files("d.json", [{"point": {"edge": 0, "offset": "1/10"}, "mult": 1}, {"point": {"vertex": "a"}, "mult": -1}])
    code, out, _ = call(["abel-jacobi", g, d], capsys)
    assert json.loads(out)["canonical"] == ["1/10"]


def test_symbolic_period_matrix(files, capsys):
    graph = {
        "vertices": ["v1", "v2"],
        "symbols": {"l1": ["2.99", "3.01"], "l2": ["4.99", "5.01"], "l3": ["6.99", "7.01"]},
        "edges": [
            {"tail": "v1", "head": "v2", "length": {"1,0,0": "1"}, "sign": 1},
            {"tail": "v1", "head": "v2", "length": {"0,1,0": "1"}, "sign": -1},
            {"tail": "v1", "head": "v2", "length": {"0,0,1": "1"}, "sign": 1},
        ],
    }
    code, out, _ = call(["period-matrix", files("g.json", graph), "--tree", "1"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["det_sign"] == "Negative"
    assert data["inertia"] == {"positive": 1, "negative": 1}


def test_divide(files, capsys):
    g = files("circle.json", CIRCLE)
    d = files("d.json", [{"point": {"edge": 0, "offset": "1/10"}, "mult": 1}, {"point": {"vertex": "a"}, "mult": -1}])
    code, out, _ = call(["divide", g, d, "--k", "2"], capsys)
    assert code == 0 and json.loads(out)["k"] == 2


def test_search_commands_need_a_seed(files, capsys, monkeypatch):
    monkeypatch.delenv("TROPLIB_SEED", raising=False)
    pol = files("pol.json", SQUARE_POL)
    code, _, err = call(["theta-search", pol], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "InputError"
    monkeypatch.setenv("TROPLIB_SEED", "7")
    code, out, _ = call(["theta-search", pol], capsys)
    assert code == 0 and json.loads(out)["seed"] == 7


def test_theta_pipeline(files, tmp_path, capsys):
    pol = files("pol.json", SQUARE_POL)
    search = str(tmp_path / "search.json")
    curve = str(tmp_path / "curve.json")
    assert call(["theta-search", pol, "--seed", "7", "--out", search], capsys)[0] == 0
    assert call(["theta-curve", search, "--out", curve], capsys)[0] == 0
    assert call(["balance-check", curve], capsys)[0] == 0
    code, out, _ = call(["theta-eval", search, "--point", "1/2,1/3"], capsys)
    assert code == 0 and "value" in json.loads(out)
    assert "<svg" in call(["render", search], capsys)[1]


def test_divide_cycle_then_verify(files, tmp_path, capsys):
    pol = files("pol.json", SQUARE_POL)
    cert = str(tmp_path / "cert.json")
    code, _, _ = call(["divide-cycle", pol, "--b", "1/2,0", "--b0", "0,0", "--k", "2", "--seed", "1", "--out", cert], capsys)
    assert code == 0
    code, out, _ = call(["verify-certificate", cert], capsys)
    assert code == 0 and json.loads(out)["verified"]
    data = json.loads(open(cert).read())
    data["certificates"][0]["ends"]["positive"][0]["weight"] += 1
    code, _, _ = call(["verify-certificate", files("bad.json", data)], capsys)
    assert code == 1


def test_fixed_sum_exit_codes(files, capsys):
    t = files("torus.json", SQUARE)
    args = ["fixed-sum", t, "--a", "0.1,0", "--b", "0.3,0", "--c", "0.15,0", "--u", "1,0"]
    assert call(args + ["--d", "0.25,0"], capsys)[0] == 0
    code, _, err = call(args + ["--d", "0.3,0"], capsys)
    assert code == 1 and json.loads(err)["error"] == "SumMismatch"


def test_polarization_and_no_curve(files, capsys):
    code, out, _ = call(["polarization", files("t.json", SQUARE)], capsys)
    assert code == 0 and json.loads(out)["kind"] == "Polarization"
    sym = {
        "n": 2,
        "symbols": {"a": ["1", "1.1"], "b": ["2", "2.1"], "c": ["1", "1.1"]},
        "M": [[{"1,0,0": "1"}, {"0,1,0": "1"}], [{"0,1,0": "1"}, {"0,0,1": "1"}]],
        "irrational_symmetric": True,
    }
    s = files("sym.json", sym)
    code, out, _ = call(["polarization", s], capsys)
    assert code == 0 and json.loads(out)["kind"] == "NoPolarizationCertificate"
    code, out, _ = call(["no-curve", s], capsys)
    assert code == 0 and json.loads(out)["kind"] == "NoCurveCertificate"
    code, _, err = call(["no-curve", files("t2.json", SQUARE)], capsys)
    assert code == 1 and json.loads(err)["error"] == "HypothesisFailed"


def test_effective_check(files, capsys):
    bad = files("v.json", {"directions": [[1, 0], [0, 1], [1, 1]], "weights": [1, 1, -1]})
    good = files("w.json", {"directions": [[1, 0], [0, 1], [-1, -1]], "weights": [1, 1, 1]})
    assert call(["effective-check", bad], capsys)[0] == 1
    assert call(["effective-check", good], capsys)[0] == 0


def test_surgery_commands(tmp_path, files, capsys):
    star = {
        "graph": {"vertices": [0], "edges": [{"tail": 0, "head": None, "sign": s} for s in (1, 1, -1)]},
        "target": {"kind": "plane", "n": 2},
        "images": [["0", "0"]],
        "directions": [[1, 0], [0, 1], [1, 1]],
    }
    code, out, _ = call(["normalize-mixed", files("star.json", star)], capsys)
    assert code == 0 and len(json.loads(out)["graph"]["vertices"]) == 2
    loop = {
        "graph": {"vertices": ["p"], "edges": [{"tail": "p", "head": "p", "length": "1"}]},
        "target": {"kind": "torus", "n": 2, "M": [["1", "0"], ["0", "1"]]},
        "images": [["1/4", "1/4"]],
        "directions": [[1, 0]],
    }
    code, out, _ = call(["pullback", files("loop.json", loop), "--k", "2"], capsys)
    assert code == 0 and len(json.loads(out)["graph"]["vertices"]) == 4


def test_val_command(capsys):
    assert json.loads(call(["val", "q^(1/2) + 3*q^2"], capsys)[1])["val"] == "1/2"
    assert json.loads(call(["val", "x + q*y"], capsys)[1])["gauss_norm"] == "0"
    assert json.loads(call(["val", "q*x", "--polytope", "0,0;1,0;0,1"], capsys)[1])["polytope_valuation"] == "1"


def test_input_errors_exit_two(tmp_path, capsys):
    code, _, err = call(["balance-check", str(tmp_path / "missing.json")], capsys)
    assert code == 2 and json.loads(err)["error"] == "InputError"
    code, _, err = call(["trop-hypersurface", "x +"], capsys)
    assert code == 2 and json.loads(err)["error"] == "ParseError"
    assert call(["no-such-command"], capsys)[0] == 2
    assert call(["render", "x.json", "--bogus"], capsys)[0] == 2


def test_graph_construct(files, capsys):
    loop = {
        "graph": {"vertices": ["p"], "edges": [{"tail": "p", "head": "p", "length": "1"}]},
        "target": {"kind": "torus", "n": 1, "M": [["1"]]},
        "images": [["0"]],
        "directions": [[1]],
    }
    f = {"vertex_values": {"p": "0"}, "edges": [{"breakpoints": ["1/2"], "slopes": [1, -1]}]}
    code, out, _ = call(["graph-construct", files("c.json", loop), files("f.json", f)], capsys)
    assert code == 0
    cert = json.loads(out)
    assert cert["ends"]["negative"] == [{"point": ["0"], "weight": 2}]
    code, _, _ = call(["verify-certificate", files("cert.json", cert)], capsys)
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "troplib.cli", "trop-hypersurface", "x+y+1"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert sorted(json.loads(proc.stdout)["directions"]) == [[-1, -1], [0, 1], [1, 0]]


def test_outputs_do_not_depend_on_hash_seed(files):
    import os

    pol = files("pol.json", SQUARE_POL)
    outputs = set()
    for hash_seed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=hash_seed)
        proc = subprocess.run(
            [sys.executable, "-m", "troplib.cli", "divide-cycle", pol, "--b", "1/2,0", "--b0", "0,0", "--k", "2", "--seed", "1"],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0
        outputs.add(proc.stdout)
    assert len(outputs) == 1
