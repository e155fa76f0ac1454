import subprocess
import sys

import pytest

from aggrelax.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main

FAST = ["--cells", "80", "--tfinal", "0.2"]


def test_run_prints_summary(capsys):
    assert main(["run", *FAST]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "dx,epsilon,w1_error,mass_drift,steps,wall_ms"
    assert out[1].startswith("0.025000000000000001,9.9999999999999995e-08,")


def test_run_writes_directory(tmp_path):
    assert main(["run", *FAST, "--scheme", "gv", "--snapshot-every", "4", "--out", str(tmp_path)]) == EXIT_OK
    names = {p.name for p in tmp_path.iterdir()}
    assert {"summary.csv", "state_final.csv", "state_0000.csv"} <= names
    assert (tmp_path / "state_final.csv").read_text().startswith("x,rho,sigma\n")


def test_exact_boundary_alias(capsys):
    args = ["run", "--scheme", "wellbalanced", "--init", "tanh", "--epsilon", "2e-4", "--cells", "100", "--tfinal", "0.02"]
    assert main([*args, "--exact-boundary", "tanh"]) == EXIT_OK
    alias = capsys.readouterr().out.splitlines()[1].split(",")[:5]
    assert main([*args, "--boundary", "exact-tanh"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[1].split(",")[:5] == alias


@pytest.mark.parametrize("args, code", [
    (["run", "--potential", "quadratic", *FAST], EXIT_INVALID),
    (["run", "--init", "1@5", *FAST], EXIT_INVALID),
    (["run", "--cfl", "1.5", *FAST], EXIT_NUMERICAL),
    (["run", "--scheme", "gv", "--fp-tol", "0", "--fp-max-iter", "1", *FAST], EXIT_NUMERICAL),
    (["sweep-dx", "--cells", "40,40,80", "--tfinal", "0.1"], EXIT_INVALID),
])
def test_exit_codes(args, code, capsys):
    assert main(args) == code
    assert capsys.readouterr().err


def test_sweep_dx_slope_line(capsys, tmp_path):
    assert main(["sweep-dx", "--cells", "40,80,160", "--tfinal", "0.5", "--epsilon", "2e-6"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and lines[-1].startswith("# slope=")
    out = tmp_path / "sweep.csv"
    assert main(["sweep-dx", "--cells", "40,80,160", "--tfinal", "0.5", "--epsilon", "2e-6", "--out", str(out)]) == 0
    written = out.read_text().splitlines()
    assert written[0] == lines[0] and written[-1] == lines[-1]


def test_sweep_eps_degenerate_warning(capsys):
    assert main(["sweep-eps", "--epsilons", "1e-300,1e-300", "--cells", "60", "--tfinal", "0.1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == "# slope=nan"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "aggrelax", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "sweep-dx" in res.stdout
