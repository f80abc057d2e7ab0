import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from xmjacobi import cli
from xmjacobi.cli import main
from xmjacobi.scattering import s_gpt


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


def schema(command):
    text = resources.files("xmjacobi").joinpath("schemas", f"{command}.json").read_text()
    return json.loads(text)


def csv_rows(out):
    lines = out.splitlines()
    assert lines[0].startswith("# config: ")
    header = lines[1].split(",")
    return header, [line.split(",") for line in lines[2:]]


def assert_one_line_error(err, kind):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith(f"xmjacobi: error[{kind}]: ")


# -- spectrum ----------------------------------------------------------------------


def test_spectrum_example(capsys):
    code, out, _ = run(capsys, "spectrum", "--g", "1", "--h", "10", "--m", "2")
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["nu", "energy_raw", "energy_scattering"]
    assert [int(r[0]) for r in rows] == [0, 1, 2]
    assert [float(r[1]) for r in rows] == [0, 16, 24]
    assert [float(r[2]) for r in rows] == [-6.25, -2.25, -0.25]


def test_spectrum_invalid_params(capsys):
    code, out, err = run(capsys, "spectrum", "--h", "2", "--g", "1", "--m", "2")
    assert code == 2 and out == ""
    assert_one_line_error(err, "invalid-input")
    assert "h-g must exceed 2m" in err.replace("−", "-")


def test_spectrum_json_schema(capsys):
    doc = run_json(capsys, "spectrum", "--m", "2")
    assert doc["schema"] == "spectrum/1"
    jsonschema.validate(doc, schema("spectrum"))


# -- smatrix ---------------------------------------------------------------------------


def test_smatrix_unitary_and_gpt_bitwise(capsys):
    code, out, _ = run(capsys, "smatrix", "--m", "0", "--k-min", "0.05", "--k-max", "5", "--k-step", "0.05")
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["k", "re_s", "im_s", "abs_s", "delta_unwrapped"]
    data = np.array(rows, dtype=float)
    assert np.max(np.abs(data[:, 3] - 1)) < 1e-10
    ref = s_gpt(4.5, 5.5, data[:, 0])
    assert np.array_equal(data[:, 1], ref.real) and np.array_equal(data[:, 2], ref.imag)


def test_smatrix_unwrapped_phase_is_continuous(capsys):
    doc = run_json(capsys, "smatrix", "--k-min", "0.01", "--k-max", "10", "--k-step", "0.01")
    delta = np.array([r[4] for r in doc["rows"]])
    assert np.max(np.abs(np.diff(delta))) < 0.5
    jsonschema.validate(doc, schema("smatrix"))


def test_smatrix_jobs_do_not_change_output(capsys):
    a = run(capsys, "smatrix", "--k-max", "3", "--jobs", "1")[1]
    b = run(capsys, "smatrix", "--k-max", "3", "--jobs", "4")[1]
    assert a.split("\n", 1)[1] == b.split("\n", 1)[1]  # only the echoed jobs differs


@pytest.mark.parametrize(
    "argv",
    [
        ("--k-min", "5", "--k-max", "1"),
        ("--k-min", "0"),
        ("--k-step", "-0.1"),
    ],
)
def test_smatrix_bad_range(capsys, argv):
    code, _, err = run(capsys, "smatrix", *argv)
    assert code == 2
    assert_one_line_error(err, "invalid-input")


# -- potential, eigenfunction, ortho ----------------------------------------------------


@pytest.mark.parametrize("convention", ["raw", "rescaled", "shifted"])
def test_potential(capsys, convention):
    doc = run_json(capsys, "potential", "--convention", convention, "--r-min", "0.5", "--r-max", "30", "--r-step", "0.5")
    jsonschema.validate(doc, schema("potential"))
    tail = doc["rows"][-1][1]
    expected = {"raw": 4 * 3.5**2 + 0, "rescaled": 3.5**2, "shifted": 0.0}[convention]
    assert tail == pytest.approx(expected, abs=1e-8 * max(1, expected))


def test_eigenfunction(capsys):
    doc = run_json(capsys, "eigenfunction", "--nu", "1", "--r-min", "0.01", "--r-max", "20", "--r-step", "0.01")
    jsonschema.validate(doc, schema("eigenfunction"))
    v = np.array([r[1] for r in doc["rows"]])
    assert np.sum(v**2) * 0.01 == pytest.approx(1.0, abs=1e-6)
    assert doc["nu"] == 1 and doc["normalization"] > 0


def test_eigenfunction_rejects_inadmissible_nu(capsys):
    code, _, err = run(capsys, "eigenfunction", "--nu", "9")
    assert code == 2
    assert_one_line_error(err, "invalid-input")


def test_ortho(capsys):
    doc = run_json(capsys, "ortho", "--m", "2")
    jsonschema.validate(doc, schema("ortho"))
    assert doc["max_leakage"] < 1e-8 and doc["max_diag_rel_error"] < 1e-8
    assert len(doc["rows"]) == 9


# -- verify --------------------------------------------------------------------------


@pytest.mark.parametrize("m", ["0", "1", "2"])
def test_verify_passes(capsys, m):
    code, out, err = run(capsys, "verify", "--m", m, "--format", "json")
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, schema("verify"))
    assert doc["passed"]
    phase = next(c for c in doc["checks"] if c["name"] == "phase_shift")
    assert phase["max_deviation"] < 1e-3
    assert doc["grid"]["backend"] in ("cython", "python")


def test_verify_tight_tolerance_fails_but_writes(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, err = run(capsys, "verify", "--max-phase-diff", "1e-12", "--format", "json", "--output", str(path))
    assert code == 1 and out == ""
    assert_one_line_error(err, "verification-failed")
    doc = json.loads(path.read_text())
    assert not doc["passed"]
    assert [c["name"] for c in doc["checks"] if not c["passed"]] == ["phase_shift"]


def test_verify_grid_override_echoed(capsys):
    doc = run_json(capsys, "verify", "--grid-step", "0.002", "--grid-r-max", "33")
    assert doc["config"]["grid_step"] == 0.002
    assert doc["grid"]["step"] == 0.002 and doc["grid"]["r_max"] == pytest.approx(33.0)


def test_verify_short_grid_reports_plateau(capsys):
    # at k=0.5 the matching points sit a quarter wavelength inside r_max,
    # where the tail of the potential is not yet below the plateau tolerance
    code, _, err = run(capsys, "verify", "--grid-r-max", "30")
    assert code == 3
    assert_one_line_error(err, "numerical")
    assert "not flat" in err


# -- config, output and failure paths ------------------------------------------------


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"g": 2.0, "h": 13.5, "m": 2, "format": "json"}))
    doc = json.loads(run(capsys, "spectrum", "--config", str(cfg))[1])
    assert doc["config"]["g"] == 2.0 and doc["config"]["m"] == 2
    doc = json.loads(run(capsys, "spectrum", "--config", str(cfg), "--m", "1")[1])
    assert doc["config"]["m"] == 1 and doc["config"]["h"] == 13.5
    doc = run_json(capsys, "spectrum")
    assert doc["config"]["g"] == cli.DEFAULTS["g"]


@pytest.mark.parametrize("content", ['{"bogus": 1}', "[1, 2]", "{not json"])
def test_bad_config(capsys, tmp_path, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content)
    code, _, err = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 2
    assert_one_line_error(err, "invalid-input")


def test_unknown_flag_and_missing_command(capsys):
    for argv in (["spectrum", "--bogus"], [], ["nope"]):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert_one_line_error(err, "invalid-input")


def test_singularity_exit_code(capsys, monkeypatch):
    from xmjacobi.errors import PoleError

    def boom(*a, **k):
        raise PoleError("gamma pole")

    monkeypatch.setattr(cli, "s_xm", boom)
    code, _, err = run(capsys, "smatrix", "--k-max", "1")
    assert code == 3
    assert_one_line_error(err, "singularity")
    assert "k in [" in err


def test_output_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(capsys, "spectrum", "--output", "spec.csv")
    assert code == 0 and out == ""
    assert (tmp_path / "spec.csv").read_text().startswith("# config: ")


def test_determinism_byte_identical(capsys, tmp_path):
    for command in ("smatrix", "verify", "ortho"):
        a, b = tmp_path / f"{command}a.json", tmp_path / f"{command}b.json"
        assert main([command, "--format", "json", "--output", str(a)]) == 0
        assert main([command, "--format", "json", "--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


def test_csv_round_trips_doubles(capsys):
    _, out, _ = run(capsys, "smatrix", "--k-max", "0.1")
    _, rows = csv_rows(out)
    ks = [float(r[0]) for r in rows]
    assert ks == [0.01 + 0.01 * i for i in range(len(ks))]


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "xmjacobi", "spectrum", "--m", "2", "--format", "json"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(out.stdout)["schema"] == "spectrum/1"
