"""Uniform 1D grid, cell states and atomic initial data."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParameter


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """Cartesian mesh of ``n_cells`` cells ``[x_{j-1/2}, x_{j+1/2})`` on ``[x_min, x_max]``."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise InvalidParameter(f"n_cells must be a positive integer, got {self.n_cells!r}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise InvalidParameter(f"empty or invalid domain [{self.x_min}, {self.x_max}]")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx

    def extended(self, left: int = 0, right: int = 0) -> "Grid":
        """Same spacing, padded with ``left``/``right`` extra cells."""
        dx = self.dx
        return Grid(self.x_min - left * dx, self.x_max + right * dx, self.n_cells + left + right)

    def cell_index(self, x) -> np.ndarray:
        """Index of the half-open cell containing each position (boundary points go right)."""
        x = np.asarray(x, dtype=np.float64)
        return np.floor((x - self.x_min) * self.n_cells / (self.x_max - self.x_min)).astype(np.int64)


@dataclass(frozen=True)
class State:
    """Cell averages of density ``rho`` and flux ``sigma``."""

    rho: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.rho)
        sigma = _frozen(self.sigma)
        if rho.ndim != 1 or rho.shape != sigma.shape:
            raise InvalidParameter(f"rho and sigma must be 1D of equal length, got {rho.shape} and {sigma.shape}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def zeros(cls, n: int) -> "State":
        return cls(np.zeros(n), np.zeros(n))

    def __len__(self):
        return self.rho.size


@dataclass(frozen=True)
class GhostData:
    """Values of (rho, sigma) in the ghost cell on each side of the domain."""

    rho_left: float = 0.0
    sigma_left: float = 0.0
    rho_right: float = 0.0
    sigma_right: float = 0.0

    @property
    def is_zero(self) -> bool:
        return not any((self.rho_left, self.sigma_left, self.rho_right, self.sigma_right))


ZERO_INFLOW = GhostData()


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite sum of weighted Dirac masses ``sum_i m_i delta_{x_i}``."""

    positions: np.ndarray = field(default_factory=lambda: np.zeros(0))
    masses: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        pos = _frozen(np.atleast_1d(self.positions))
        mass = _frozen(np.atleast_1d(self.masses))
        if pos.shape != mass.shape or pos.ndim != 1:
            raise InvalidParameter("positions and masses must be 1D sequences of equal length")
        if np.any(mass < 0) or not np.all(np.isfinite(mass)) or not np.all(np.isfinite(pos)):
            raise InvalidParameter("atom masses must be finite and nonnegative")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "masses", mass)

    @classmethod
    def from_pairs(cls, pairs) -> "AtomicMeasure":
        pairs = list(pairs)
        if not pairs:
            return cls()
        pos, mass = zip(*pairs)
        return cls(np.array(pos, dtype=float), np.array(mass, dtype=float))

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def __len__(self):
        return self.positions.size


def deposit(measure: AtomicMeasure, grid: Grid) -> np.ndarray:
    """Cell densities ``rho_j = measure(C_j) / dx``."""
    rho = np.zeros(grid.n_cells)
    if len(measure) == 0:
        return rho
    outside = (measure.positions < grid.x_min) | (measure.positions >= grid.x_max)
    if np.any(outside):
        bad = measure.positions[outside][0]
        raise InvalidParameter(f"atom at x = {bad!r} lies outside [{grid.x_min}, {grid.x_max})")
    idx = np.clip(grid.cell_index(measure.positions), 0, grid.n_cells - 1)
    np.add.at(rho, idx, measure.masses)
    return rho / grid.dx


def _check_speed(c: float):
    if not c > 0:
        raise InvalidParameter(f"relaxation speed c must be positive, got {c!r}")


def to_diagonal(state: State, c: float) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal variables ``mu = sigma - c rho``, ``nu = sigma + c rho``."""
    _check_speed(c)
    return state.sigma - c * state.rho, state.sigma + c * state.rho


def from_diagonal(mu, nu, c: float) -> State:
    _check_speed(c)
    mu = np.asarray(mu, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    return State((nu - mu) / (2.0 * c), 0.5 * (mu + nu))


def total_mass(state: State | np.ndarray, grid: Grid) -> float:
    rho = state.rho if isinstance(state, State) else np.asarray(state)
    return float(np.sum(rho) * grid.dx)


def write_state_csv(path, state: State, grid: Grid) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "rho", "sigma"])
        for x, r, s in zip(grid.centers, state.rho, state.sigma):
            writer.writerow([f"{x:.17g}", f"{r:.17g}", f"{s:.17g}"])


def read_state_csv(path) -> tuple[np.ndarray, State]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], State(data[:, 1], data[:, 2])
