"""Well-balanced scheme built from linearised stationary problems at each interface.

Interfaces are indexed ``k = 0..N``: interface ``k`` separates cell ``k-1`` from
cell ``k`` (cells ``-1`` and ``N`` are ghosts) and its velocities are sampled at
the center ``x_k`` of its right-hand cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceFailure, InvalidParameter
from .mesh import ZERO_INFLOW, AtomicMeasure, GhostData, Grid, State, to_diagonal
from .metrics import wasserstein
from .potentials import Potential
from .splitting import check_stability
from .velocity import velocity

SERIES_CUTOFF = 1e-8


def kappa(a, dx: float, epsilon: float, c: float, side: str):
    """Exponential coefficient ``a / (1 - exp(-+ a dx / (eps c^2)))`` of the left or right problem."""
    if side not in ("L", "R"):
        raise InvalidParameter(f"side must be 'L' or 'R', got {side!r}")
    if not (epsilon > 0 and c > 0 and dx > 0):
        raise InvalidParameter("kappa needs epsilon, c and dx positive")
    a = np.asarray(a, dtype=np.float64)
    theta = dx / (epsilon * c * c)
    sign = 1.0 if side == "L" else -1.0
    x = a * theta
    small = np.abs(x) < SERIES_CUTOFF
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        # a / (1 - e^{-sign x}) = -a / expm1(-sign x); inf denominators give the exact 0 limit
        out = -a / np.expm1(-sign * x)
        series = sign / theta + 0.5 * a + sign * a * x / 12.0
    out = np.where(small, series, out)
    return float(out) if out.ndim == 0 else out


def kappa_pair(a_left, a_right, dx, epsilon, c):
    return kappa(a_left, dx, epsilon, c, "L"), kappa(a_right, dx, epsilon, c, "R")


def limit_kappa_pair(a_left, a_right):
    """Limit coefficients ``(a_L)_+`` and ``-(a_R)_-`` reached as epsilon goes to 0."""
    return np.maximum(a_left, 0.0), np.minimum(a_right, 0.0)


def interface_solve(mu_right, nu_left, kappa_left, kappa_right, c: float):
    """One-sided densities and flux of the linearised stationary problem at an interface.

    ``mu_right`` is ``mu_j`` in the cell to the right, ``nu_left`` is ``nu_{j-1}``
    in the cell to the left.
    """
    mu_right = np.asarray(mu_right, dtype=np.float64)
    nu_left = np.asarray(nu_left, dtype=np.float64)
    kl = np.asarray(kappa_left, dtype=np.float64)
    kr = np.asarray(kappa_right, dtype=np.float64)
    denom = c - kr + kl
    rho_left = ((c - kr) * nu_left + kr * mu_right) / (c * denom)
    rho_right = (kl * nu_left - (c + kl) * mu_right) / (c * denom)
    sigma_half = (nu_left * kl - mu_right * kr) / denom
    return rho_left, rho_right, sigma_half


@dataclass(frozen=True)
class FixedPointConfig:
    # W2 reacts to a mass change m like sqrt(m), so 1e-6 already pins the iterates to ~1e-12 in L1
    tol: float = 1e-6
    max_iter: int = 50

    def __post_init__(self):
        if not self.tol >= 0:
            raise InvalidParameter(f"tol must be nonnegative, got {self.tol!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidParameter(f"max_iter must be a positive integer, got {self.max_iter!r}")


@dataclass(frozen=True)
class WellBalancedParams:
    c: float
    epsilon: float
    cfl: float = 0.9
    fixed_point: FixedPointConfig = field(default_factory=FixedPointConfig)

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidParameter(f"c must be positive, got {self.c!r}")
        if not self.epsilon > 0:
            raise InvalidParameter(f"epsilon must be positive, got {self.epsilon!r}")
        if not 0 < self.cfl <= 1:
            raise InvalidParameter(f"cfl must lie in (0, 1], got {self.cfl!r}")

    def dt(self, grid: Grid) -> float:
        return self.cfl * grid.dx / self.c


@dataclass(frozen=True)
class InterfaceData:
    """Converged per-interface quantities, arrays of length ``n_cells + 1``."""

    a_left: np.ndarray
    a_right: np.ndarray
    kappa_left: np.ndarray
    kappa_right: np.ndarray
    rho_left: np.ndarray
    rho_right: np.ndarray
    sigma_half: np.ndarray
    iterations: int


KappaFn = Callable[[np.ndarray, np.ndarray], tuple]


def iterate_distance(prev, new, grid: Grid, ref_mass: float) -> float:
    """Distance between successive one-sided density iterates.

    Both iterates are read as atoms ``(x_{k-1/2}, rho dx)``. When both are
    nonnegative with positive mass, the result is ``W_2`` between the
    self-normalised measures plus the relative change of mass; otherwise it
    falls back to the L1 distance.
    """
    m_prev = prev * grid.dx
    m_new = new * grid.dx
    tot_prev, tot_new = m_prev.sum(), m_new.sum()
    if tot_prev <= 0 or tot_new <= 0 or m_prev.min() < 0 or m_new.min() < 0:
        return float(np.abs(m_new - m_prev).sum())
    x = grid.edges
    w2 = wasserstein(AtomicMeasure(x, m_prev / tot_prev), AtomicMeasure(x, m_new / tot_new), p=2)
    scale = ref_mass if ref_mass > 0 else max(tot_prev, tot_new)
    return w2 + abs(tot_new - tot_prev) / scale


def _interface_grid(grid: Grid) -> Grid:
    # interface k is labelled by the center x_k, k = 0..N
    return grid.extended(right=1)


def fixed_point_velocities(
    state: State,
    grid: Grid,
    potential: Potential,
    epsilon: float,
    c: float,
    config: FixedPointConfig = FixedPointConfig(),
    ghosts: GhostData = ZERO_INFLOW,
    kappa_fn: KappaFn | None = None,
) -> InterfaceData:
    """Resolve the coupling between interface velocities and one-sided densities."""
    if kappa_fn is None:
        dx = grid.dx

        def kappa_fn(al, ar):
            return kappa_pair(al, ar, dx, epsilon, c)

    mu, nu = to_diagonal(state, c)
    nu_left = np.concatenate(([ghosts.sigma_left + c * ghosts.rho_left], nu))
    mu_right = np.concatenate((mu, [ghosts.sigma_right - c * ghosts.rho_right]))

    padded = grid.extended(left=1, right=1)
    rho_padded = np.concatenate(([ghosts.rho_left], state.rho, [ghosts.rho_right]))
    a_cells = np.clip(velocity(rho_padded, padded, potential), -potential.a_inf, potential.a_inf)
    a_left, a_right = a_cells[:-1], a_cells[1:]

    igrid = _interface_grid(grid)
    ref_mass = float(state.rho.sum() * grid.dx)

    kl, kr = kappa_fn(a_left, a_right)
    rho_l, rho_r, sigma = interface_solve(mu_right, nu_left, kl, kr, c)
    distance = np.inf
    # one-sided iterates are not probability densities away from equilibrium; keep |a| <= a_inf
    bound = potential.a_inf
    for it in range(1, config.max_iter + 1):
        a_left = np.clip(velocity(rho_l, igrid, potential), -bound, bound)
        a_right = np.clip(velocity(rho_r, igrid, potential), -bound, bound)
        kl, kr = kappa_fn(a_left, a_right)
        new_l, new_r, sigma = interface_solve(mu_right, nu_left, kl, kr, c)
        distance = max(
            iterate_distance(rho_l, new_l, grid, ref_mass),
            iterate_distance(rho_r, new_r, grid, ref_mass),
        )
        prev = (rho_l, rho_r)
        rho_l, rho_r = new_l, new_r
        if distance <= config.tol:
            return InterfaceData(a_left, a_right, np.asarray(kl), np.asarray(kr), rho_l, rho_r, sigma, it)
    raise ConvergenceFailure(config.max_iter, distance, prev, (rho_l, rho_r))


def flux_update(state: State, sigma_half: np.ndarray, c: float, dt: float, dx: float) -> State:
    """Conservative update from the interface fluxes ``sigma_{j-1/2}``, ``j = 0..N``."""
    ratio = dt / dx
    right, left = sigma_half[1:], sigma_half[:-1]
    rho = state.rho - ratio * (right - left)
    sigma = state.sigma - c * ratio * (2.0 * state.sigma - right - left)
    return State(rho, sigma)


def _step(state, grid, potential, c, epsilon, dt, config, ghosts, kappa_fn, exact_boundary):
    check_stability(c, dt, grid, potential)
    data = fixed_point_velocities(state, grid, potential, epsilon, c, config, ghosts, kappa_fn)
    sigma_half = data.sigma_half
    if not exact_boundary:
        sigma_half = sigma_half.copy()
        sigma_half[0] = sigma_half[-1] = 0.0
    return flux_update(state, sigma_half, c, dt, grid.dx), data


def wb_step(
    state: State,
    grid: Grid,
    potential: Potential,
    params: WellBalancedParams,
    ghosts: GhostData | None = None,
    dt: float | None = None,
    return_data: bool = False,
):
    """One step of the well-balanced scheme.

    With ``ghosts=None`` the boundary interfaces carry no flux; otherwise the
    given ghost-cell values feed the boundary interface problems.
    """
    dt = params.dt(grid) if dt is None else dt
    new, data = _step(
        state, grid, potential, params.c, params.epsilon, dt, params.fixed_point,
        ZERO_INFLOW if ghosts is None else ghosts, None, ghosts is not None,
    )
    return (new, data) if return_data else new
