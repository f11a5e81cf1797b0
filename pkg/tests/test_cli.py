import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from lgdot import __version__, densmat
from lgdot.cli import CSV_HEADER, cmd_validate, main


def write_config(tmp_path, body):
    path = tmp_path / "run.cfg"
    path.write_text(body)
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_evolve_two_steps(tmp_path):
    cfg = write_config(tmp_path, "run.t_max = 100\nrun.t_steps = 2\n")
    assert main(["evolve", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rows = read_csv(tmp_path / "o" / "evolve.csv")
    assert rows[0] == list(CSV_HEADER)
    assert [float(r[0]) for r in rows[1:]] == [0.0, 100.0]
    k_t, k_2t, k_plus, k_minus = map(float, rows[2][1:])
    assert k_plus == k_2t + 2 * k_t and k_minus == k_2t - 2 * k_t
    assert (tmp_path / "o" / "evolve.svg").read_text().startswith("<?xml")


def test_evolve_json_schema(tmp_path):
    cfg = write_config(tmp_path, "run.t_max = 50\nrun.t_steps = 3\nrun.formats = json\n")
    assert main(["evolve", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "evolve.json").read_text())
    assert set(doc) == {"config", "points"}
    assert set(doc["config"]) == {"dot", "run"}
    assert doc["config"]["dot"]["s_fss"] == 3.0
    assert [set(p) for p in doc["points"]] == [set(CSV_HEADER) - {"t_ps"} | {"t"}] * 3
    assert not (tmp_path / "evolve.csv").exists()


def test_evolve_deterministic(tmp_path):
    cfg = write_config(tmp_path, "run.t_max = 400\nrun.t_steps = 9\n")
    for d in ("a", "b"):
        assert main(["evolve", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    for name in ("evolve.csv", "evolve.json", "evolve.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sweep_outputs(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "run.t_max = 600\nrun.t_steps = 7\nrun.sweep_axis = g_noise\nrun.sweep_values = 0, 1\n",
    )
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert {p.name for p in tmp_path.iterdir()} >= {
        "sweep_g_noise_00.csv",
        "sweep_g_noise_01.csv",
        "sweep_summary.csv",
        "sweep.json",
        "sweep.svg",
    }
    summary = read_csv(tmp_path / "sweep_summary.csv")
    assert summary[0] == ["g_noise", "min_k_minus", "first_violation_t_ps"]
    assert summary[2][2] == "none"
    assert float(summary[1][1]) < float(summary[2][1])
    assert "0.0\t" in capsys.readouterr().out
    doc = json.loads((tmp_path / "sweep.json").read_text())
    assert doc["axis"] == "g_noise" and len(doc["curves"]) == 2


def test_sweep_requires_axis(tmp_path, capsys):
    cfg = write_config(tmp_path, "run.t_steps = 2\n")
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "sweep_axis" in capsys.readouterr().err


@pytest.mark.parametrize("body", ["dot.s_fss = -1\n", "dot.nonsense = 1\n", "run.t_steps = x\n"])
def test_bad_config_exit_code(tmp_path, capsys, body):
    assert main(["evolve", "--config", write_config(tmp_path, body), "--out", str(tmp_path)]) == 2
    assert capsys.readouterr().err.startswith("lgdot: error:")


def test_missing_config_file(tmp_path):
    assert main(["evolve", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_version():
    out = subprocess.run([sys.executable, "-m", "lgdot.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == f"lgdot {__version__}"


@pytest.mark.slow
def test_validate_detects_broken_propagator(capsys):
    def broken(rho0, gen, t):
        rho = densmat.propagate(rho0, gen, t)
        return rho + 1e-6 * np.eye(rho.shape[0])

    assert cmd_validate(broken) == 1
    out = capsys.readouterr().out
    assert "FAIL  expm propagation vs RK4 reference" in out
    assert "validation FAILED" in out
