"""Wasserstein distances between 1D measures and a few discrete norms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .mesh import AtomicMeasure, Grid, State, to_diagonal

MASS_TOL = 1e-10


@dataclass(frozen=True)
class QuantileFunction:
    """Right-continuous step function ``F^{-1}(z) = positions[i]`` for ``z`` in ``[cum[i-1], cum[i])``."""

    cum_mass: np.ndarray
    positions: np.ndarray

    @classmethod
    def of(cls, measure: AtomicMeasure) -> "QuantileFunction":
        keep = measure.masses > 0
        pos = measure.positions[keep]
        mass = measure.masses[keep]
        if pos.size == 0:
            raise InvalidParameter("cannot build the quantile function of a zero measure")
        order = np.argsort(pos, kind="stable")
        pos = pos[order]
        cum = np.cumsum(mass[order]) / mass.sum()
        cum[-1] = 1.0
        return cls(cum, pos)

    def __call__(self, z):
        idx = np.searchsorted(self.cum_mass, np.asarray(z, dtype=np.float64), side="right")
        return self.positions[np.minimum(idx, self.positions.size - 1)]


def wasserstein(mu: AtomicMeasure, nu: AtomicMeasure, p: int = 1) -> float:
    """Exact ``W_p`` between two atomic measures of equal mass via their quantile functions."""
    if p not in (1, 2):
        raise InvalidParameter(f"p must be 1 or 2, got {p!r}")
    m_mu, m_nu = mu.total_mass, nu.total_mass
    if abs(m_mu - m_nu) > MASS_TOL * max(1.0, m_mu, m_nu):
        raise InvalidParameter(f"mass mismatch: {m_mu!r} vs {m_nu!r}")
    if m_mu == 0.0:
        return 0.0
    qf, qg = QuantileFunction.of(mu), QuantileFunction.of(nu)
    levels = np.union1d(qf.cum_mass, qg.cum_mass)
    widths = np.diff(levels, prepend=0.0)
    mid = levels - 0.5 * widths
    gap = np.abs(qf(mid) - qg(mid))
    if p == 1:
        return float(np.dot(widths, gap))
    return float(np.sqrt(np.dot(widths, gap * gap)))


def grid_measure(rho, grid: Grid, positions=None, clip_tol: float = 1e-12) -> AtomicMeasure:
    """Atoms ``(x_j, rho_j dx)``; negative round-off below ``clip_tol * total`` is dropped."""
    rho = np.asarray(rho, dtype=np.float64)
    x = grid.centers if positions is None else np.asarray(positions, dtype=np.float64)
    mass = rho * grid.dx
    scale = max(np.abs(mass).sum(), np.finfo(float).tiny)
    if np.any(mass < -clip_tol * scale):
        raise InvalidParameter(f"density has negative mass {mass.min()!r}; not a measure")
    return AtomicMeasure(x, np.maximum(mass, 0.0))


def state_distance(rho, reference: AtomicMeasure | np.ndarray, grid: Grid, p: int = 1) -> float:
    """``W_p`` between a grid density and a measure or another density on the same grid."""
    mu = grid_measure(rho, grid)
    nu = reference if isinstance(reference, AtomicMeasure) else grid_measure(reference, grid)
    # renormalise the reference so round-off mass drift does not trip the mass check
    if nu.total_mass > 0:
        nu = AtomicMeasure(nu.positions, nu.masses * (mu.total_mass / nu.total_mass))
    return wasserstein(mu, nu, p)


def cdf_transform(rho, grid: Grid) -> np.ndarray:
    """``u_j = 1/2 - sum_{k <= j} rho_k dx``, the Burgers variable of the Newtonian case."""
    return 0.5 - np.cumsum(np.asarray(rho, dtype=np.float64)) * grid.dx


def _same_length(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidParameter(f"length mismatch: {a.shape} vs {b.shape}")
    return a, b


def l1_diag_norm(state: State, c: float, dx: float = 1.0) -> float:
    """``sum_j (|mu_j| + |nu_j|) dx``."""
    mu, nu = to_diagonal(state, c)
    return float((np.abs(mu).sum() + np.abs(nu).sum()) * dx)


def tv(values) -> float:
    return float(np.abs(np.diff(np.asarray(values, dtype=np.float64))).sum())


def linf_diff(a, b) -> float:
    a, b = _same_length(a, b)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def l1_diff(a, b, dx: float = 1.0) -> float:
    a, b = _same_length(a, b)
    return float(np.abs(a - b).sum() * dx)
