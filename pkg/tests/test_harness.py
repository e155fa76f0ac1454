import math

import numpy as np
import pytest

from aggrelax.errors import CFLViolation, InvalidParameter, SchemeFailure, SubcharacteristicViolation
from aggrelax.harness import (
    RunConfig, SweepResult, convergence_sweep, epsilon_sweep, fit_slope, format_summary, parse_init, run, write_run,
)
from aggrelax.mesh import AtomicMeasure, read_state_csv

SMALL = dict(n_cells=100, t_final=0.3)


def test_parse_init():
    m = parse_init("0.25@-0.5, 0.75@0.1")
    np.testing.assert_array_equal(m.positions, [-0.5, 0.1])
    np.testing.assert_array_equal(m.masses, [0.25, 0.75])
    assert parse_init("tanh") == "tanh" and parse_init("tanh-equilibrium") == "tanh"
    with pytest.raises(InvalidParameter, match="MASS@POSITION"):
        parse_init("0.5:-0.5")


@pytest.mark.parametrize("change, exc", [
    (dict(scheme="upwind"), InvalidParameter),
    (dict(boundary="periodic"), InvalidParameter),
    (dict(n_cells=0), InvalidParameter),
    (dict(cfl=1.5), CFLViolation),
    (dict(epsilon=0.0), InvalidParameter),
    (dict(potential="quadratic"), SubcharacteristicViolation),
    (dict(init="1@2.0"), InvalidParameter),
    (dict(fp_max_iter=0), InvalidParameter),
])
def test_invalid_configs(change, exc):
    with pytest.raises(exc):
        run(RunConfig(**{**SMALL, **change}))


def test_negative_final_time():
    with pytest.raises(InvalidParameter):
        run(RunConfig(n_cells=20, t_final=-1.0))


def test_zero_final_time_echoes_initial_state():
    rep = run(RunConfig(t_final=0.0, n_cells=40))
    assert rep.steps == 0 and rep.mass_drift == 0.0
    np.testing.assert_array_equal(rep.final.rho, np.eye(40)[10] / rep.grid.dx * 0.5 + np.eye(40)[30] / rep.grid.dx * 0.5)


def test_last_step_lands_on_final_time():
    cfg = RunConfig(**SMALL)
    rep = run(cfg)
    dt = cfg.cfl * rep.grid.dx / cfg.c
    assert rep.steps == math.ceil(cfg.t_final / dt)
    # the clipped step puts the exact particles at the right place
    assert rep.w1_error < 3 * rep.grid.dx


@pytest.mark.parametrize("scheme", ["splitting", "wellbalanced", "rusanov", "gv"])
def test_runs_conserve_mass(scheme):
    rep = run(RunConfig(scheme=scheme, **SMALL))
    assert rep.mass_drift <= 1e-13
    assert rep.w1_error < 0.1


def test_quadratic_run_needs_c2():
    rep = run(RunConfig(potential="quadratic", c=2.0, epsilon=1e-2, n_cells=60, t_final=0.2))
    assert math.isfinite(rep.w1_error)


def test_tanh_run_has_exact_oracle():
    rep = run(RunConfig(scheme="wellbalanced", init="tanh", boundary="exact-tanh", epsilon=2e-4, n_cells=100,
                        t_final=0.05))
    assert rep.w1_error <= 1e-10


def test_fixed_point_failure_surfaces_step_and_time():
    with pytest.raises(SchemeFailure) as info:
        run(RunConfig(scheme="gv", fp_tol=0.0, fp_max_iter=1, **SMALL))
    # the first step starts at equilibrium, sigma = a[rho] rho, and converges at once
    dt = 0.9 * 2.0 / 100
    assert info.value.step == 1 and info.value.time == pytest.approx(dt)


def test_determinism(tmp_path):
    cfg = RunConfig(scheme="wellbalanced", snapshot_every=5, **SMALL)
    a = run(cfg.__class__(**{**cfg.__dict__, "out": str(tmp_path / "a")}))
    b = run(cfg.__class__(**{**cfg.__dict__, "out": str(tmp_path / "b")}))
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "state_final.csv" in files and "summary.csv" in files and "state_0000.csv" in files
    for name in files:
        if name != "summary.csv":
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    # wall time is the only field allowed to differ
    ra, rb = a.summary_row(), b.summary_row()
    ra.pop("wall_ms"), rb.pop("wall_ms")
    assert ra == rb


def test_write_run_formats(tmp_path):
    rep = run(RunConfig(**SMALL))
    write_run(rep, tmp_path)
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0] == "dx,epsilon,w1_error,mass_drift,steps,wall_ms"
    assert lines[1].split(",")[4] == str(rep.steps)
    x, state = read_state_csv(tmp_path / "state_final.csv")
    np.testing.assert_array_equal(state.rho, rep.final.rho)


def test_format_summary_slope_line(tmp_path):
    import io

    buf = io.StringIO()
    format_summary(buf, [dict(dx=0.1, epsilon=1e-3, w1_error=0.5, mass_drift=0.0, steps=3, wall_ms=1.0)], 0.98)
    assert buf.getvalue().splitlines()[-1] == "# slope=0.97999999999999998"


def test_fit_slope():
    assert fit_slope([1, 2, 4], [3, 6, 12]) == pytest.approx(1.0)
    assert math.isnan(fit_slope([1, 2, 4], [0, 0, 1e-3]))


def test_sweep_validation():
    with pytest.raises(InvalidParameter):
        convergence_sweep(RunConfig(**SMALL), [100, 200])
    with pytest.raises(InvalidParameter):
        convergence_sweep(RunConfig(**SMALL), [100, 100, 200])
    with pytest.raises(InvalidParameter):
        epsilon_sweep(RunConfig(**SMALL), [1e-3])
    with pytest.raises(InvalidParameter):
        epsilon_sweep(RunConfig(scheme="gv", **SMALL), [1e-3, 1e-4])


def test_convergence_sweep_exact_and_parallel():
    base = RunConfig(t_final=0.5, epsilon=2e-6)
    serial = convergence_sweep(base, [50, 100, 200])
    parallel = convergence_sweep(base, [50, 100, 200], jobs=3)
    assert [r["w1_error"] for r in serial.rows] == [r["w1_error"] for r in parallel.rows]
    assert serial.monotone and 0.7 < serial.slope < 1.3


def test_convergence_sweep_self_oracle_reports_reference_zero():
    base = RunConfig(potential="quadratic", c=2.0, epsilon=1e-2, t_final=0.2)
    res = convergence_sweep(base, [40, 80, 160], oracle="self")
    assert res.rows[-1]["w1_error"] == 0.0
    assert math.isnan(res.slope) is False
    res = convergence_sweep(base, [40, 80, 160], oracle="self", reference_cells=320)
    assert all(r["w1_error"] > 0 for r in res.rows)


def test_epsilon_sweep_underflow_is_degenerate():
    base = RunConfig(n_cells=80, t_final=0.3)
    res = epsilon_sweep(base, [1e-300, 1e-300])
    assert all(r["w1_error"] <= 1e-12 for r in res.rows)
    assert res.degenerate and isinstance(res, SweepResult)


def test_epsilon_sweep_distance_shrinks_with_epsilon():
    base = RunConfig(n_cells=200, t_final=0.5)
    res = epsilon_sweep(base, [1e-1, 1e-2, 1e-3])
    errs = [r["w1_error"] for r in res.rows]
    assert errs[0] > errs[1] > errs[2] > 0
    exact = epsilon_sweep(base, [1e-1, 1e-2], reference="exact")
    assert all(r["w1_error"] > 0 for r in exact.rows)
