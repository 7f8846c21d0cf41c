import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bergtoep import checks, cli
from bergtoep.toeplitz import OperatorMatrix

SYMBOLS = Path(__file__).resolve().parent.parent / "symbols"


def _run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _table(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def _header(text):
    first = text.splitlines()[0]
    assert first.startswith("# ")
    return json.loads(first[2:])


def test_gram_defaults(capsys):
    code, out, _ = _run(["--command", "gram", "--n", "2", "--lambda", "1.5", "--degree", "8"], capsys)
    assert code == 0
    cfg = _header(out)
    assert cfg["m"] == 1 and cfg["degree"] == 8
    assert (cfg["grid"], cfg["line_nodes"], cfg["line_halfwidth"], cfg["seed"], cfg["format"]) == (64, 4001, 40.0, 42, "csv")
    rows = _table(out)
    assert len(rows) == 45
    assert max(float(r["rel_residual"]) for r in rows) <= 1e-10


def test_pole_guard_exit_2(capsys):
    code, out, err = _run(["gram", "--n", "2", "--lambda", "2.0"], capsys)
    assert code == 2 and out == ""
    assert "field 'lambda'" in err


def test_config_precedence(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "gram", "n": 2, "lambda": 1.5, "degree": 3}))
    code, out, _ = _run(["--config", str(path), "--lambda", "0.7"], capsys)
    assert code == 0
    cfg = _header(out)
    assert cfg["lambda"] == 0.7 and cfg["degree"] == 3


@pytest.mark.parametrize(
    "payload, field",
    [({"command": "gram", "n": 2, "lambda": 1.5, "degre": 3}, "degre"), ({"command": "gram", "n": 2}, "lambda")],
)
def test_config_errors(tmp_path, capsys, payload, field):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    code, _, err = _run(["--config", str(path)], capsys)
    assert code == 2 and field in err


def test_config_syntax_error_reports_line(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{\n "n": 2,\n "lambda": ,\n}')
    code, _, err = _run(["gram", "--config", str(path)], capsys)
    assert code == 2 and "line 3" in err


def test_spectrum_modsq_both_routes(capsys):
    code, out, _ = _run(["spectrum", "--symbol", str(SYMBOLS / "modsq.json"), "--n", "1", "--lambda", "0.5", "--method", "both"], capsys)
    assert code == 0
    rows = _table(out)
    assert list(rows[0]) == ["r1", "eig_diagonal_re", "eig_diagonal_im", "eig_convolution_re", "eig_convolution_im", "abs_diff", "on_support"]
    assert max(float(r["abs_diff"]) for r in rows) <= 1e-8
    k = np.array([int(r["r1"]) for r in rows])
    np.testing.assert_allclose([float(r["eig_diagonal_re"]) for r in rows], (k + 1) / (0.5 + k), rtol=1e-14)


def test_spectrum_noninvariant_exit_2(capsys):
    code, _, err = _run(["spectrum", "--symbol", str(SYMBOLS / "z1_n2.json"), "--n", "2", "--lambda", "0.5"], capsys)
    assert code == 2 and "invariant" in err


def test_kernel_fourier_example(capsys):
    code, out, _ = _run(["kernel-fourier", "--group", "elliptic", "--n", "1", "--lambda", "2", "--grid", "64"], capsys)
    assert code == 0
    row = [r for r in _table(out) if r["r1"] == "1"][0]
    assert abs(float(row["re"]) - 1.0) <= 1e-10


def test_kernel_fourier_aliasing_exit_3(capsys):
    code, _, err = _run(["kernel-fourier", "--n", "2", "--lambda", "0.5", "--degree", "10", "--grid", "16"], capsys)
    assert code == 3 and "aliased" in err


def test_l1_missing_q_exit_2(capsys):
    code, _, err = _run(["l1", "--group", "parabolic", "--n", "2", "--lambda", "0.5"], capsys)
    assert code == 2 and "field 'q'" in err
    code, out, _ = _run(["l1", "--group", "parabolic", "--n", "2", "--lambda", "0.5", "--q", "identity", "--grid", "8"], capsys)
    assert code == 0
    vals = [float(r["integral"]) for r in _table(out)]
    assert vals == sorted(vals)


def test_toeplitz_exports(tmp_path, capsys):
    binpath = tmp_path / "T.bin"
    code, out, _ = _run(
        ["toeplitz", "--symbol", str(SYMBOLS / "modsq_n2.json"), "--n", "2", "--lambda", "0.7", "--degree", "3",
         "--format", "json", "--export-binary", str(binpath)],
        capsys,
    )
    assert code == 0
    body = json.loads(out)
    T = OperatorMatrix.from_json(body["matrix"])
    U = OperatorMatrix.read_binary(binpath)
    assert np.array_equal(T.entries, U.entries)
    assert body["spectral_radius"] == pytest.approx(T.spectral_radius())


def test_commutator_and_intertwine(capsys):
    code, out, _ = _run(
        ["commutator", "--symbol", str(SYMBOLS / "modsq_n2.json"), "--symbol2", str(SYMBOLS / "defect_n2.json"), "--n", "2", "--lambda", "0.5"],
        capsys,
    )
    assert code == 0 and float(_table(out)[0]["commutator_frobenius"]) <= 1e-12
    code, out, _ = _run(
        ["intertwine", "--symbol", str(SYMBOLS / "z1_n2.json"), "--n", "2", "--lambda", "1.3", "--degree", "4", "--torus", "[[0, 1], [-1, 0]]"],
        capsys,
    )
    assert code == 0 and float(_table(out)[0]["intertwine_residual"]) <= 1e-11


def test_csv_cells_roundtrip(capsys):
    code, out, _ = _run(["gram", "--n", "3", "--lambda", "0.3", "--degree", "4"], capsys)
    for row in _table(out):
        v = row["h_lambda"]
        assert repr(float(v)) == repr(float("%.17g" % float(v)))


def test_output_file_deterministic(tmp_path, capsys):
    args = ["spectrum", "--symbol", str(SYMBOLS / "modsq_n2.json"), "--n", "2", "--lambda", "0.9", "--degree", "4"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["-o", str(a)]) == 0
    assert cli.main(args + ["-o", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_check_exit_codes(monkeypatch, capsys):
    code, out, err = _run(["check", "--suite", "gram"], capsys)
    assert code == 0
    assert "PASS gram/gram-identity" in err
    rows = _table(out)
    assert {r["status"] for r in rows} == {"pass"}

    def failing(seed):
        return [checks.CheckResult("broken", "always", False, 1.0, 0.0, "")]

    monkeypatch.setitem(checks.SUITES, "broken", failing)
    code, _, err = _run(["check", "--suite", "broken"], capsys)
    assert code == 1 and "FAIL broken/always" in err
    code, _, err = _run(["check", "--suite", "nope"], capsys)
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bergtoep", "gram", "--n", "1", "--lambda", "0.3", "--degree", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# {")


def test_kernel_fourier_multiplier_guard(capsys):
    code, out, _ = _run(["kernel-fourier", "--n", "1", "--lambda", "2", "--degree", "2", "--multiplier"], capsys)
    assert code == 0
    rows = _table(out)
    assert float(rows[2]["sqrt_multiplier"]) == pytest.approx(0.75 ** 0.5)
    # window truncation leaves small negative parts in the numeric parabolic table
    code, _, err = _run(["kernel-fourier", "--group", "parabolic", "--n", "2", "--lambda", "4", "--degree", "2", "--multiplier"], capsys)
    assert code == 3 and "negative or complex" in err
