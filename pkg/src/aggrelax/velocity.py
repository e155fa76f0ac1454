"""Nonlocal velocity ``a[rho] = -W' * rho`` sampled at cell centers.

The self term ``k = j`` is always left out of the sum and every term carries
the quadrature weight ``dx`` so that ``|a_j| <= a_inf`` for probability data.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameter
from .mesh import Grid
from .potentials import Potential

_ROW_BLOCK = 512


def _check(rho, grid: Grid) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.float64)
    if rho.shape != (grid.n_cells,):
        raise InvalidParameter(f"density has length {rho.size}, grid has {grid.n_cells} cells")
    return rho


def convolve(rho, grid: Grid, potential: Potential) -> np.ndarray:
    """Generic O(N^2) evaluation of ``a_j = -sum_{k != j} W'(x_j - x_k) rho_k dx``."""
    rho = _check(rho, grid)
    x = grid.centers
    n = x.size
    a = np.empty(n)
    weights = rho * grid.dx
    for start in range(0, n, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, n)
        diff = x[start:stop, None] - x[None, :]
        rows = np.arange(stop - start)
        # placeholder keeps W' away from 0 on the excluded diagonal
        diff[rows, rows + start] = 1.0
        kernel = potential.derivative(diff)
        kernel[rows, rows + start] = 0.0
        a[start:stop] = -(kernel @ weights)
    return a


def newtonian_fast(rho, grid: Grid) -> np.ndarray:
    """O(N) Newtonian velocity ``a_j = (M_right - M_left) / 2`` from prefix sums."""
    rho = _check(rho, grid)
    m = rho * grid.dx
    left = np.concatenate(([0.0], np.cumsum(m)[:-1]))
    right = np.concatenate((np.cumsum(m[::-1])[:-1][::-1], [0.0]))
    return 0.5 * (right - left)


def quadratic_fast(rho, grid: Grid) -> np.ndarray:
    """O(N) velocity for W(x) = x^2/2 from the zeroth and first moments."""
    rho = _check(rho, grid)
    m = rho * grid.dx
    x = grid.centers
    return -(x * m.sum() - np.dot(x, m))


def velocity(rho, grid: Grid, potential: Potential) -> np.ndarray:
    """Velocity field, dispatching to a closed-form fast path when one exists."""
    if potential.name == "newtonian":
        return newtonian_fast(rho, grid)
    if potential.name == "quadratic":
        return quadratic_fast(rho, grid)
    return convolve(rho, grid, potential)
