import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from blochsep import bench, cli, decomp, io, states
from blochsep.bloch import to_bloch

GOLDEN = Path(__file__).parent / "golden"


def _approx_equal(a, b, tol=1e-9):
    if isinstance(a, dict):
        assert a.keys() == b.keys()
        for k in a:
            _approx_equal(a[k], b[k], tol)
    elif isinstance(a, list):
        assert len(a) == len(b)
        for x, y in zip(a, b):
            _approx_equal(x, y, tol)
    elif isinstance(a, float):
        assert b == pytest.approx(a, abs=tol)
    else:
        assert a == b


def _run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def state_file(tmp_path):
    def write(rho, name="state.json"):
        path = tmp_path / name
        io.dump_state(rho, path)
        return str(path)

    return write


@pytest.mark.parametrize("family,golden", [
    (["bennett"], "bennett_report.json"),
    (["werner", "--D", "3", "--phi", "0.33"], "werner_D3_phi0.33_report.json"),
])
def test_analyze_matches_golden(tmp_path, capsys, family, golden):
    src = tmp_path / "in.json"
    assert _run(["family", *family, "--out", str(src)], capsys)[0] == 0
    code, out, _ = _run(["analyze", str(src)], capsys)
    expected = json.loads((GOLDEN / golden).read_text())
    _approx_equal(expected, json.loads(out))
    assert code == {"entangled": 1, "separable": 0}[expected["overall"]]


def test_analyze_bennett(state_file, capsys):
    code, out, _ = _run(["analyze", state_file(states.bennett_tiles())], capsys)
    rep = json.loads(out)
    assert code == cli.EXIT_ENTANGLED
    thm1 = next(r for r in rep["results"] if r["name"] == "theorem1")
    assert thm1["statistic"] == pytest.approx(3.1603, abs=5e-5)


def test_analyze_exit_codes(state_file, capsys):
    assert _run(["analyze", state_file(states.maximally_mixed(3, 3))], capsys)[0] == cli.EXIT_SEPARABLE
    assert _run(["analyze", state_file(states.werner(3, 0.33))], capsys)[0] == cli.EXIT_SEPARABLE
    # PPT-invisible region for a 3x3 Werner state: no test decides
    assert _run(["analyze", state_file(states.werner(3, 0.8))], capsys)[0] == cli.EXIT_UNKNOWN


def test_analyze_text(state_file, capsys):
    code, out, _ = _run(["analyze", state_file(states.werner_from_p(0.6)), "--format", "text"], capsys)
    assert code == cli.EXIT_ENTANGLED
    assert out.startswith("state 2x2: entangled")
    assert "corollary1" in out


def test_malformed_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = _run(["analyze", str(bad)], capsys)
    assert code == cli.EXIT_ERROR and "invalid JSON" in err

    bad.write_text(json.dumps({"M": 2, "N": 2, "rows": io.complex_rows(np.eye(4))}))
    code, _, err = _run(["analyze", str(bad)], capsys)
    assert code == cli.EXIT_ERROR and "density matrix" in err

    bad.write_text(json.dumps({"M": 2}))
    assert _run(["analyze", str(bad)], capsys)[0] == cli.EXIT_ERROR
    assert _run(["analyze", str(tmp_path / "missing.json")], capsys)[0] == cli.EXIT_ERROR


def test_usage_errors_exit_3(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["analyze"])
    assert exc.value.code == cli.EXIT_ERROR
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == cli.EXIT_ERROR


def test_tolerance_flag_and_env(tmp_path, capsys, monkeypatch):
    mat = np.eye(4) / 4
    mat[0, 0] += 1e-7
    path = tmp_path / "noisy.json"
    path.write_text(json.dumps({"M": 2, "N": 2, "rows": io.complex_rows(mat)}))
    assert _run(["analyze", str(path)], capsys)[0] == cli.EXIT_ERROR
    code, out, _ = _run(["analyze", str(path), "--tol", "1e-6"], capsys)
    assert code == cli.EXIT_SEPARABLE
    assert json.loads(out)["tolerances"]["file"] == 1e-6
    monkeypatch.setenv("BLOCHSEP_TOL", "1e-6")
    assert _run(["analyze", str(path)], capsys)[0] == cli.EXIT_SEPARABLE
    monkeypatch.setenv("BLOCHSEP_TOL", "abc")
    assert _run(["analyze", str(path)], capsys)[0] == cli.EXIT_ERROR


def test_state_file_round_trip_is_bit_exact(tmp_path):
    rho = states.random_state(2, 3, 17)
    path = tmp_path / "r.json"
    io.dump_state(rho, path)
    np.testing.assert_array_equal(io.load_state(path).mat, rho.mat)


def test_decompose_werner(state_file, tmp_path, capsys):
    out_path = tmp_path / "d.json"
    code, _, err = _run(["decompose", state_file(states.werner_from_p(0.25)), "--out", str(out_path)], capsys)
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["residual"] <= 1e-9
    assert "residual=" in err
    d = decomp.ProductDecomposition.from_dict(data)
    assert decomp.verify(states.werner_from_p(0.25), d) <= 1e-9


def test_decompose_routes(state_file, capsys):
    code, out, err = _run(["decompose", state_file(states.bennett_tiles())], capsys)
    assert code == cli.EXIT_UNKNOWN and "no sufficient condition" in err
    code, out, _ = _run(["decompose", state_file(states.maximally_mixed(2, 2))], capsys)
    assert code == 0 and json.loads(out)["source"] == "prop3"
    code, out, _ = _run(["decompose", state_file(states.maximally_mixed(2, 2)), "--method", "remark2"], capsys)
    assert code == 0 and json.loads(out)["source"] == "remark2"
    code, _, _ = _run(["decompose", state_file(states.werner_from_p(0.9)), "--method", "prop3"], capsys)
    assert code == cli.EXIT_UNKNOWN


def test_family_outputs(tmp_path, capsys):
    code, out, _ = _run(["family", "werner", "--D", "3", "--phi", "0.2"], capsys)
    rho = io.state_from_dict(json.loads(out))
    assert code == 0 and rho.dims == (3, 3)
    code, out, _ = _run(["family", "bennett"], capsys)
    np.testing.assert_allclose(io.state_from_dict(json.loads(out)).mat, states.bennett_tiles().mat)
    code, out, _ = _run(["family", "isotropic", "--D", "4", "--p", "0.3"], capsys)
    assert io.state_from_dict(json.loads(out)).dims == (4, 4)
    code, out, _ = _run(["family", "bell-diagonal", "--q", "0.4", "0.3", "0.2", "0.1"], capsys)
    assert code == 0
    code, out, _ = _run(["family", "example2", "--p", "0.3", "--sign", "-"], capsys)
    assert code == 0


def test_family_errors(capsys):
    assert _run(["family", "werner", "--D", "3"], capsys)[0] == cli.EXIT_ERROR
    assert _run(["family", "werner", "--D", "3", "--phi", "3"], capsys)[0] == cli.EXIT_ERROR
    assert _run(["family", "bell-diagonal"], capsys)[0] == cli.EXIT_ERROR
    assert _run(["family", "isotropic", "--D", "2", "--p", "-0.5"], capsys)[0] == cli.EXIT_ERROR


@pytest.mark.parametrize("D", [2, 3, 4])
def test_family_to_analyze_round_trip(tmp_path, capsys, D):
    for phi in (-0.7, 0.1, 0.9):
        path = tmp_path / "w.json"
        _run(["family", "werner", "--D", str(D), "--phi", str(phi), "--out", str(path)], capsys)
        _, out, _ = _run(["analyze", str(path)], capsys)
        assert abs(json.loads(out)["bloch"]["kf_T"] - D * abs(D * phi - 1) / 2) <= 1e-9
    for p in (0.05, 0.5):
        path = tmp_path / "i.json"
        _run(["family", "isotropic", "--D", str(D), "--p", str(p), "--out", str(path)], capsys)
        _, out, _ = _run(["analyze", str(path)], capsys)
        assert abs(json.loads(out)["bloch"]["kf_T"] - p * D * (D * D - 1) / 2) <= 1e-9


def test_basis(capsys):
    code, out, _ = _run(["basis", "--N", "2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["labels"] == ["w0", "u01", "v01"]
    sx = io.parse_complex_rows(data["generators"][1])
    np.testing.assert_array_equal(sx, [[0, 1], [1, 0]])
    code, out, _ = _run(["basis", "--N", "3", "--ordering", "gellmann3"], capsys)
    assert json.loads(out)["labels"] == ["u01", "v01", "w0", "u02", "v02", "u12", "v12", "w1"]
    assert _run(["basis", "--N", "1"], capsys)[0] == cli.EXIT_ERROR
    assert _run(["basis", "--N", "4", "--ordering", "gellmann3"], capsys)[0] == cli.EXIT_ERROR


def test_bench_worker_independence(tmp_path, capsys):
    outs = []
    for workers in (1, 3):
        path = tmp_path / f"b{workers}.json"
        code, _, _ = _run(["bench", "--M", "2", "--N", "2", "--samples", "60", "--seed", "5",
                           "--measure", "ginibre", "--workers", str(workers), "--out", str(path)], capsys)
        assert code == 0
        outs.append(path.read_text())
    assert outs[0] == outs[1]


def test_bench_two_qubits_detects_nothing():
    rep = bench.run_bench(2, 2, 300, seed=1, measure="ginibre", max_tries=1000)
    assert rep.ppt_pass == 300
    assert rep.detected_thm1 == rep.detected_ccnr == 0


def test_bench_csv(tmp_path, capsys):
    csv_path = tmp_path / "b.csv"
    code, out, _ = _run(["bench", "--samples", "20", "--seed", "2", "--csv", str(csv_path)], capsys)
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "criterion,detections,rate,ci_low,ci_high"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["theorem1", "ccnr", "both"]
    rep = json.loads(out)
    assert rep["rates"]["ccnr"]["ci_low"] <= rep["rates"]["ccnr"]["rate"] <= rep["rates"]["ccnr"]["ci_high"]


def test_bench_report_invariants():
    rep = bench.BenchReport(3, 3, 10, 0, "ginibre", 10, 10, 10, 2, 1, 2)
    with pytest.raises(AssertionError):
        rep.check_invariants()
    rep = bench.BenchReport(3, 3, 10, 0, "ginibre", 10, 10, 10, 2, 3, 1)
    with pytest.raises(AssertionError):
        rep.check_invariants()
    bench.BenchReport(2, 4, 10, 0, "ginibre", 10, 10, 10, 2, 3, 1).check_invariants()
    with pytest.raises(ValueError):
        bench.run_bench(3, 3, 0)
    with pytest.raises(ValueError):
        bench.run_bench(3, 3, 5, measure="bures")


def test_wilson_interval_reference():
    # 0 of 10: Wilson upper bound is z^2 / (n + z^2)
    rep = bench.BenchReport(3, 3, 10, 0, "ginibre", 10, 10, 10, 0, 0, 0)
    z2 = 1.959963984540054**2
    assert rep.rates()["ccnr"]["ci_high"] == pytest.approx(z2 / (10 + z2))


def test_bench_records_exhausted_samples():
    out = bench.evaluate_sample(4, 4, 0, 0, measure="ginibre", max_tries=2)
    assert not out.ppt and out.tries == 2


def test_module_entry_point(state_file):
    path = state_file(states.maximally_mixed(2, 2))
    proc = subprocess.run([sys.executable, "-m", "blochsep", "analyze", path, "--format", "text"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "separable" in proc.stdout


def test_bloch_of_loaded_state_matches(state_file):
    rho = states.example2(0.3)
    loaded = io.load_state(state_file(rho))
    np.testing.assert_array_equal(to_bloch(loaded).T, to_bloch(rho).T)
