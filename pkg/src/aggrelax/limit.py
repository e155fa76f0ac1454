"""Schemes for the aggregation equation itself, reached by the relaxation schemes as epsilon -> 0."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .mesh import ZERO_INFLOW, GhostData, Grid, State
from .potentials import Potential
from .splitting import check_stability
from .velocity import velocity
from .wellbalanced import FixedPointConfig, _step, limit_kappa_pair


@dataclass(frozen=True)
class LimitParams:
    c: float
    cfl: float = 0.9
    fixed_point: FixedPointConfig = field(default_factory=FixedPointConfig)

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidParameter(f"c must be positive, got {self.c!r}")
        if not 0 < self.cfl <= 1:
            raise InvalidParameter(f"cfl must lie in (0, 1], got {self.cfl!r}")

    def dt(self, grid: Grid) -> float:
        return self.cfl * grid.dx / self.c


def rusanov_step(
    rho,
    grid: Grid,
    potential: Potential,
    params: LimitParams,
    ghosts: GhostData = ZERO_INFLOW,
    dt: float | None = None,
) -> np.ndarray:
    """Centered flux ``a rho`` plus diffusion ``c (rho_{j+1} - 2 rho_j + rho_{j-1}) / 2``."""
    dt = params.dt(grid) if dt is None else dt
    check_stability(params.c, dt, grid, potential)
    rho = np.asarray(rho, dtype=np.float64)
    flux = velocity(rho, grid, potential) * rho
    rho_ext = np.concatenate(([ghosts.rho_left], rho, [ghosts.rho_right]))
    flux_ext = np.concatenate(([ghosts.sigma_left], flux, [ghosts.sigma_right]))
    ratio = dt / (2.0 * grid.dx)
    return (
        rho
        - ratio * (flux_ext[2:] - flux_ext[:-2])
        + params.c * ratio * (rho_ext[2:] - 2.0 * rho + rho_ext[:-2])
    )


def gv_step(
    state: State,
    grid: Grid,
    potential: Potential,
    params: LimitParams,
    ghosts: GhostData | None = None,
    dt: float | None = None,
    return_data: bool = False,
):
    """Well-balanced step with the limiting coefficients ``(a_L)_+`` and ``-(a_R)_-``."""
    dt = params.dt(grid) if dt is None else dt
    new, data = _step(
        state, grid, potential, params.c, np.inf, dt, params.fixed_point,
        ZERO_INFLOW if ghosts is None else ghosts, limit_kappa_pair, ghosts is not None,
    )
    return (new, data) if return_data else new
