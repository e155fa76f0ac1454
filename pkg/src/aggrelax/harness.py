"""Time loop, resolution and epsilon sweeps, and CSV reporting."""
from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import CFLViolation, ConvergenceFailure, InvalidParameter, SchemeFailure, SubcharacteristicViolation
from .limit import LimitParams, gv_step, rusanov_step
from .mesh import ZERO_INFLOW, AtomicMeasure, Grid, State, deposit, total_mass, write_state_csv
from .metrics import state_distance
from .oracles import ParticleSystem, particle_evolve, stationary_ghosts, stationary_profile
from .potentials import Potential, by_name
from .splitting import SplittingParams, splitting_step
from .velocity import velocity
from .wellbalanced import FixedPointConfig, WellBalancedParams, wb_step

log = logging.getLogger(__name__)

SCHEMES = ("splitting", "wellbalanced", "rusanov", "gv")
BOUNDARIES = ("zero", "exact-tanh")
LIMIT_OF = {"splitting": "rusanov", "wellbalanced": "gv"}
SUMMARY_FIELDS = ("dx", "epsilon", "w1_error", "mass_drift", "steps", "wall_ms")


def parse_init(text: str) -> AtomicMeasure | str:
    """``"m1@x1,m2@x2"`` gives an atomic measure; ``"tanh"`` the equilibrium profile."""
    text = text.strip()
    if text in ("tanh", "tanh-equilibrium"):
        return "tanh"
    pairs = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            mass, pos = item.split("@")
            pairs.append((float(pos), float(mass)))
        except ValueError:
            raise InvalidParameter(f"cannot parse atom {item!r}; expected MASS@POSITION") from None
    return AtomicMeasure.from_pairs(pairs)


@dataclass(frozen=True)
class RunConfig:
    scheme: str = "splitting"
    potential: str = "newtonian"
    epsilon: float = 1e-7
    c: float = 1.0
    cfl: float = 0.9
    n_cells: int = 1500
    x_min: float = -1.0
    x_max: float = 1.0
    t_final: float = 1.2
    init: str = "0.5@-0.5,0.5@0.5"
    boundary: str = "zero"
    fp_tol: float = FixedPointConfig.tol
    fp_max_iter: int = FixedPointConfig.max_iter
    snapshot_every: int = 0
    out: str | None = None

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise InvalidParameter(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.boundary not in BOUNDARIES:
            raise InvalidParameter(f"unknown boundary mode {self.boundary!r}; expected one of {BOUNDARIES}")
        if not self.t_final >= 0:
            raise InvalidParameter(f"t_final must be nonnegative, got {self.t_final!r}")
        if not 0 < self.cfl <= 1:
            raise CFLViolation(self.cfl)
        if not self.epsilon > 0:
            raise InvalidParameter(f"epsilon must be positive, got {self.epsilon!r}")
        if not self.c > 0:
            raise InvalidParameter(f"c must be positive, got {self.c!r}")
        potential = self.make_potential()
        if self.c < potential.a_inf:
            raise SubcharacteristicViolation(self.c, potential.a_inf)
        self.grid()
        parse_init(self.init)
        FixedPointConfig(self.fp_tol, self.fp_max_iter)

    def grid(self) -> Grid:
        return Grid(self.x_min, self.x_max, self.n_cells)

    def make_potential(self) -> Potential:
        return by_name(self.potential, self.x_min, self.x_max)


@dataclass
class RunReport:
    config: RunConfig
    grid: Grid
    final: State
    steps: int
    mass_drift: float
    w1_error: float
    wall_ms: float
    fp_iterations_max: int = 0
    fp_iterations_mean: float = 0.0
    snapshots: list = field(default_factory=list)

    def summary_row(self) -> dict:
        return {
            "dx": self.grid.dx,
            "epsilon": self.config.epsilon,
            "w1_error": self.w1_error,
            "mass_drift": self.mass_drift,
            "steps": self.steps,
            "wall_ms": self.wall_ms,
        }


def initial_state(config: RunConfig, grid: Grid, potential: Potential) -> State:
    init = parse_init(config.init)
    if isinstance(init, str):
        return State(stationary_profile(grid, config.epsilon, config.c), np.zeros(grid.n_cells))
    rho = deposit(init, grid)
    return State(rho, velocity(rho, grid, potential) * rho)


def oracle_measure(config: RunConfig, grid: Grid, potential: Potential):
    """Exact solution at ``t_final`` as a measure or a grid density, or None when unknown."""
    init = parse_init(config.init)
    if isinstance(init, str):
        return stationary_profile(grid, config.epsilon, config.c)
    try:
        system = particle_evolve(ParticleSystem.from_measure(init), potential, config.t_final)
    except NotImplementedError:
        return None
    return system.to_measure()


def _stepper(config: RunConfig, grid: Grid, potential: Potential):
    exact = config.boundary == "exact-tanh"
    ghosts = stationary_ghosts(grid, config.epsilon, config.c) if exact else ZERO_INFLOW
    fp = FixedPointConfig(config.fp_tol, config.fp_max_iter)
    scheme = config.scheme

    if scheme == "splitting":
        params = SplittingParams(config.c, config.epsilon, config.cfl)
        return lambda s, dt: (splitting_step(s, grid, potential, params, ghosts, dt), 0)
    if scheme == "rusanov":
        params = LimitParams(config.c, config.cfl, fp)

        def rusanov(s, dt):
            rho = rusanov_step(s.rho, grid, potential, params, ghosts, dt)
            return State(rho, velocity(rho, grid, potential) * rho), 0

        return rusanov
    wb_ghosts = ghosts if exact else None
    if scheme == "wellbalanced":
        params = WellBalancedParams(config.c, config.epsilon, config.cfl, fp)

        def wellbalanced(s, dt):
            new, data = wb_step(s, grid, potential, params, wb_ghosts, dt, return_data=True)
            return new, data.iterations

        return wellbalanced
    params = LimitParams(config.c, config.cfl, fp)

    def gv(s, dt):
        new, data = gv_step(s, grid, potential, params, wb_ghosts, dt, return_data=True)
        return new, data.iterations

    return gv


def run(config: RunConfig) -> RunReport:
    """Integrate from t = 0 to ``t_final`` with ``dt = cfl dx / c``, clipping the last step."""
    config.validate()
    grid = config.grid()
    potential = config.make_potential()
    state = initial_state(config, grid, potential)
    step = _stepper(config, grid, potential)

    dt0 = config.cfl * grid.dx / config.c
    n_steps = 0 if config.t_final == 0 else max(1, math.ceil(config.t_final / dt0 - 1e-9))
    mass0 = total_mass(state, grid)
    drift = 0.0
    iterations = []
    snapshots = [(0.0, state)] if config.snapshot_every else []
    start = time.perf_counter()
    for n in range(n_steps):
        t = n * dt0
        dt = dt0 if n < n_steps - 1 else config.t_final - t
        try:
            state, its = step(state, dt)
        except (ConvergenceFailure, CFLViolation, FloatingPointError) as exc:
            raise SchemeFailure(n, t, exc) from exc
        iterations.append(its)
        mass = total_mass(state, grid)
        drift = max(drift, abs(mass - mass0) / (abs(mass0) if mass0 else 1.0))
        if config.snapshot_every and (n + 1) % config.snapshot_every == 0 and n + 1 < n_steps:
            snapshots.append(((n + 1) * dt0, state))
    wall_ms = 1e3 * (time.perf_counter() - start)
    if config.snapshot_every:
        snapshots.append((config.t_final, state))

    reference = oracle_measure(config, grid, potential)
    w1 = math.nan if reference is None else state_distance(state.rho, reference, grid)
    report = RunReport(
        config, grid, state, n_steps, drift, w1, wall_ms,
        max(iterations, default=0), float(np.mean(iterations)) if iterations else 0.0, snapshots,
    )
    log.info("%s N=%d eps=%g: %d steps, W1=%.3e, %.0f ms",
             config.scheme, grid.n_cells, config.epsilon, n_steps, w1, wall_ms)
    if config.out:
        write_run(report, config.out)
    return report


def write_run(report: RunReport, out) -> None:
    """State CSVs plus a one-row summary CSV into directory ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_state_csv(out / "state_final.csv", report.final, report.grid)
    for k, (t, s) in enumerate(report.snapshots):
        write_state_csv(out / f"state_{k:04d}.csv", s, report.grid)
    write_summary_csv(out / "summary.csv", [report.summary_row()])


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def format_summary(fh, rows, slope: float | None = None, fields=SUMMARY_FIELDS) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(row[f]) for f in fields])
    if slope is not None:
        fh.write(f"# slope={_fmt(slope)}\n")


def write_summary_csv(path, rows, slope: float | None = None, fields=SUMMARY_FIELDS) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        format_summary(fh, rows, slope, fields)


def fit_slope(x, err) -> float:
    """Least-squares slope of ``log err`` against ``log x``; NaN when fewer than two usable points."""
    x = np.asarray(x, dtype=np.float64)
    err = np.asarray(err, dtype=np.float64)
    ok = np.isfinite(err) & (err > 0) & (x > 0)
    if np.unique(x[ok]).size < 2:
        return math.nan
    return float(np.polyfit(np.log(x[ok]), np.log(err[ok]), 1)[0])


@dataclass
class SweepResult:
    rows: list
    slope: float
    reports: list = field(default_factory=list, repr=False)

    @property
    def degenerate(self) -> bool:
        return not math.isfinite(self.slope)

    @property
    def monotone(self) -> bool:
        errs = [r["w1_error"] for r in self.rows]
        return all(b <= a for a, b in zip(errs, errs[1:]))

    def write(self, path) -> None:
        write_summary_csv(path, self.rows, self.slope)


def _run_all(configs, jobs: int):
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, configs))
    return [run(c) for c in configs]


def convergence_sweep(
    base: RunConfig,
    cell_counts,
    oracle: str = "auto",
    reference_cells: int | None = None,
    jobs: int = 1,
) -> SweepResult:
    """W1 error against an oracle for each resolution, with the fitted order in dx.

    ``oracle`` is ``"exact"`` (particle dynamics or the tanh equilibrium),
    ``"self"`` (run at ``reference_cells``, default the finest count) or
    ``"auto"`` (exact when available, otherwise self).
    """
    cells = [int(n) for n in cell_counts]
    if len(cells) < 3 or any(b <= a for a, b in zip(cells, cells[1:])):
        raise InvalidParameter(f"need at least 3 strictly increasing cell counts, got {cells}")
    if oracle not in ("auto", "exact", "self"):
        raise InvalidParameter(f"unknown oracle {oracle!r}")
    configs = [replace(base, n_cells=n, out=None) for n in cells]
    if oracle == "auto":
        oracle = "exact" if oracle_measure(configs[0], configs[0].grid(), base.make_potential()) is not None else "self"

    reference = None
    if oracle == "self":
        ref_n = max(cells) if reference_cells is None else int(reference_cells)
        jobs_configs = configs + ([] if ref_n in cells else [replace(base, n_cells=ref_n, out=None)])
        reports = _run_all(jobs_configs, jobs)
        ref_report = reports[cells.index(ref_n)] if ref_n in cells else reports[-1]
        reports = reports[: len(cells)]
        reference = ref_report
    else:
        reports = _run_all(configs, jobs)

    rows = []
    for rep in reports:
        row = rep.summary_row()
        if reference is not None:
            ref_measure = AtomicMeasure(reference.grid.centers, np.maximum(reference.final.rho, 0) * reference.grid.dx)
            row["w1_error"] = state_distance(rep.final.rho, ref_measure, rep.grid)
        rows.append(row)
    slope = fit_slope([r["dx"] for r in rows], [r["w1_error"] for r in rows])
    result = SweepResult(rows, slope, reports)
    if not result.monotone:
        log.warning("errors are not monotone in dx: %s", [r["w1_error"] for r in rows])
    return result


def epsilon_sweep(
    base: RunConfig,
    epsilons,
    limit_scheme: str | None = None,
    jobs: int = 1,
    reference: str = "limit",
) -> SweepResult:
    """W1 distance between relaxation runs and the limit-scheme run on the same mesh.

    ``reference="exact"`` measures against the exact solution instead, which
    folds the discretisation error of each run into the distance.
    """
    eps = [float(e) for e in epsilons]
    if len(eps) < 2:
        raise InvalidParameter("need at least two epsilon values")
    if reference not in ("limit", "exact"):
        raise InvalidParameter(f"unknown reference {reference!r}")
    if reference == "exact":
        reports = _run_all([replace(base, epsilon=e, out=None) for e in eps], jobs)
        rows = [r.summary_row() for r in reports]
        return SweepResult(rows, fit_slope(eps, [r["w1_error"] for r in rows]), reports)
    if limit_scheme is None:
        if base.scheme not in LIMIT_OF:
            raise InvalidParameter(f"{base.scheme!r} is already a limit scheme")
        limit_scheme = LIMIT_OF[base.scheme]
    configs = [replace(base, epsilon=e, out=None) for e in eps]
    reports = _run_all(configs + [replace(base, scheme=limit_scheme, out=None)], jobs)
    limit = reports.pop()
    rows = []
    for rep in reports:
        row = rep.summary_row()
        row["w1_error"] = state_distance(rep.final.rho, limit.final.rho, rep.grid)
        rows.append(row)
    slope = fit_slope(eps, [r["w1_error"] for r in rows])
    return SweepResult(rows, slope, reports + [limit])
