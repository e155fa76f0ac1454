"""Splitting scheme: exact relaxation of the source, then upwind transport of (mu, nu)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CFLViolation, InvalidParameter, SubcharacteristicViolation
from .mesh import ZERO_INFLOW, GhostData, Grid, State, from_diagonal, to_diagonal
from .potentials import Potential
from .velocity import velocity

CFL_SLACK = 1e-12


@dataclass(frozen=True)
class SplittingParams:
    c: float
    epsilon: float
    cfl: float = 0.9

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidParameter(f"c must be positive, got {self.c!r}")
        if not self.epsilon > 0:
            raise InvalidParameter(f"epsilon must be positive, got {self.epsilon!r}")
        if not 0 < self.cfl <= 1:
            raise InvalidParameter(f"cfl must lie in (0, 1], got {self.cfl!r}")

    def dt(self, grid: Grid) -> float:
        return self.cfl * grid.dx / self.c


def check_stability(c: float, dt: float, grid: Grid, potential: Potential | None = None):
    ratio = c * dt / grid.dx
    if ratio > 1.0 + CFL_SLACK:
        raise CFLViolation(ratio)
    if potential is not None and c < potential.a_inf:
        raise SubcharacteristicViolation(c, potential.a_inf)


def relax_step(state: State, a, dt: float, epsilon: float) -> State:
    """Exact solution of the stiff source over ``dt``: rho is frozen, sigma relaxes to ``a rho``."""
    if not epsilon > 0:
        raise InvalidParameter(f"epsilon must be positive, got {epsilon!r}")
    decay = np.exp(-dt / epsilon)
    a = np.asarray(a, dtype=np.float64)
    return State(state.rho, state.sigma * decay + a * state.rho * (1.0 - decay))


def transport_step(state: State, c: float, dt: float, grid: Grid, ghosts: GhostData = ZERO_INFLOW) -> State:
    """Upwind step for ``mu_t - c mu_x = 0`` and ``nu_t + c nu_x = 0``."""
    ratio = c * dt / grid.dx
    if ratio > 1.0 + CFL_SLACK:
        raise CFLViolation(ratio)
    mu, nu = to_diagonal(state, c)
    mu_ghost = ghosts.sigma_right - c * ghosts.rho_right
    nu_ghost = ghosts.sigma_left + c * ghosts.rho_left
    mu_next = np.append(mu[1:], mu_ghost)
    nu_prev = np.insert(nu[:-1], 0, nu_ghost)
    return from_diagonal(mu + ratio * (mu_next - mu), nu - ratio * (nu - nu_prev), c)


def splitting_step(
    state: State,
    grid: Grid,
    potential: Potential,
    params: SplittingParams,
    ghosts: GhostData = ZERO_INFLOW,
    dt: float | None = None,
) -> State:
    dt = params.dt(grid) if dt is None else dt
    check_stability(params.c, dt, grid, potential)
    a = velocity(state.rho, grid, potential)
    half = relax_step(state, a, dt, params.epsilon)
    return transport_step(half, params.c, dt, grid, ghosts)
