import json
import subprocess
import sys
from pathlib import Path

import pytest

from hessquot.cli import main, parse_config
from hessquot.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--out", str(out), "--quiet"])
    report = out / "report.json"
    return code, (json.loads(report.read_text()) if report.exists() else None), out


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_solve_poisson_preset(tmp_path):
    code, rep, out = run(tmp_path, "solve", str(CONFIGS / "preset_poisson.cfg"))
    assert code == 0
    assert rep["schema"] == 1 and rep["solve"]["converged"] is True
    assert rep["bounds"]["c0_bound_check"]["ok"] is True
    assert rep["solve"]["error_vs_exact"] < 1e-10
    assert (out / "field.csv").read_text().startswith("# grid n=2 dims=17,17")


def test_bad_signature_exit_1(tmp_path, capsys):
    code, rep, _ = run(tmp_path, "solve", str(CONFIGS / "bad_signature.cfg"))
    assert code == 1 and rep is None
    assert "0 <= l < k" in capsys.readouterr().err


def test_verify_constant_psi(tmp_path):
    code, rep, out = run(tmp_path, "verify", str(CONFIGS / "verify_constant_psi.cfg"))
    assert code == 0
    assert rep["structural"]["alpha0_ok"] is False
    assert rep["structural"]["alpha0_measured"] == 0.0
    assert rep["growth"]["ok"] is True
    assert "solve" not in rep and not (out / "field.csv").exists()


def test_solver_failure_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, """
problem.n = 2
problem.p = 1
problem.k = 1
problem.l = 0
problem.psi_tilde = "sqrt(1.5 - u)"
problem.phi = "-u + 5"
solver.dims = 7, 7
solver.t_step_min = 0.1
solver.max_iter = 2
""")
    code, rep, _ = run(tmp_path, "solve", cfg)
    assert code == 2
    assert rep["solve"]["converged"] is False
    assert "solver failure" in capsys.readouterr().err


def test_sweep_radial(tmp_path):
    cfg = write(tmp_path, (CONFIGS / "radial.cfg").read_text().replace(
        "sweep.levels = 17, 33, 65, 129, 257", "sweep.levels = 17, 33, 65"))
    code, rep, _ = run(tmp_path, "sweep", cfg)
    assert code == 0
    study = rep["sweep"]["study"]
    assert len(rep["sweep"]["runs"]) == 3
    assert all(order > 1.8 for order in study["observed_order"])
    assert study["h"] == [1 / 16, 1 / 32, 1 / 64]


def test_sweep_requires_levels(tmp_path):
    code, _, _ = run(tmp_path, "sweep", str(CONFIGS / "preset_poisson.cfg"))
    assert code == 1


@pytest.mark.parametrize("text,message", [
    ("problem.n = 2\nproblem.bogus = 1\n", "unknown key"),
    ("problem.n = 2\nproblem.n = 3\n", "duplicate"),
    ("problem.n\n", "expected"),
    ("problem.n = two\n", "cannot parse"),
    ('problem.phi = -u\n', "double-quoted"),
])
def test_config_errors(text, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(text)


def test_config_comments_and_quotes():
    cfg = parse_config('# header\nproblem.phi = "-u # not a comment"  # trailing\n\nsolver.dims = 5, 6\n')
    assert cfg.get("problem", "phi") == "-u # not a comment"
    assert cfg.get("solver", "dims") == (5, 6)


def test_missing_file_and_expression_error(tmp_path):
    code, _, _ = run(tmp_path, "solve", str(tmp_path / "nope.cfg"))
    assert code == 1
    cfg = write(tmp_path, 'problem.n = 2\nproblem.p = 1\nproblem.k = 1\nproblem.l = 0\n'
                          'problem.psi_tilde = "x3"\nproblem.phi = "-u"\n')
    assert run(tmp_path, "solve", cfg)[0] == 1


def test_same_seed_same_bytes(tmp_path):
    cfg = str(CONFIGS / "manufactured.cfg")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["solve", cfg, "--out", str(a), "--seed", "7", "--quiet"]) == 0
    assert main(["solve", cfg, "--out", str(b), "--seed", "7", "--quiet"]) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "field.csv").read_bytes() == (b / "field.csv").read_bytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hessquot.cli", "verify",
                           str(CONFIGS / "verify_constant_psi.cfg"), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "alpha0_ok=False" in proc.stderr
