"""Reference solutions: exact particle dynamics, the tanh equilibrium and a brute-force convolution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .mesh import AtomicMeasure, GhostData, Grid
from .potentials import Potential

# relative tolerance for deciding that several collisions happen at the same instant
SIMULTANEOUS_RTOL = 1e-12


@dataclass(frozen=True)
class ParticleSystem:
    positions: tuple
    masses: tuple
    time: float = 0.0
    # (time, position, indices merged) for every collision event
    history: tuple = ()

    def __post_init__(self):
        if len(self.positions) != len(self.masses):
            raise InvalidParameter("positions and masses differ in length")
        if any(m <= 0 for m in self.masses):
            raise InvalidParameter("particle masses must be positive")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise InvalidParameter("particle positions must be strictly increasing")

    @classmethod
    def from_measure(cls, measure: AtomicMeasure) -> "ParticleSystem":
        keep = measure.masses > 0
        pos = measure.positions[keep]
        mass = measure.masses[keep]
        order = np.argsort(pos, kind="stable")
        pos, mass = pos[order], mass[order]
        # coincident atoms are one particle
        merged_pos, merged_mass = [], []
        for x, m in zip(pos, mass):
            if merged_pos and x == merged_pos[-1]:
                merged_mass[-1] += m
            else:
                merged_pos.append(float(x))
                merged_mass.append(float(m))
        return cls(tuple(merged_pos), tuple(merged_mass))

    def to_measure(self) -> AtomicMeasure:
        return AtomicMeasure(np.array(self.positions), np.array(self.masses))

    @property
    def total_mass(self) -> float:
        return float(sum(self.masses))


def newtonian_velocities(masses) -> np.ndarray:
    """``v_i = (mass right of i - mass left of i) / 2`` for sorted particles."""
    m = np.asarray(masses, dtype=np.float64)
    left = np.concatenate(([0.0], np.cumsum(m)[:-1]))
    right = m.sum() - left - m
    return 0.5 * (right - left)


def _evolve_newtonian(system: ParticleSystem, t_final: float) -> ParticleSystem:
    pos = np.array(system.positions, dtype=np.float64)
    mass = np.array(system.masses, dtype=np.float64)
    t = system.time
    history = list(system.history)
    while True:
        vel = newtonian_velocities(mass)
        gaps = np.diff(pos)
        closing = vel[:-1] - vel[1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            hit = np.where(closing > 0, gaps / closing, np.inf)
        dt_hit = hit.min() if hit.size else np.inf
        if t + dt_hit > t_final:
            pos = pos + vel * (t_final - t)
            t = t_final
            break
        pos = pos + vel * dt_hit
        t = t + dt_hit
        colliding = hit <= dt_hit * (1.0 + SIMULTANEOUS_RTOL)
        new_pos, new_mass = [pos[0]], [mass[0]]
        group = [0]
        for i in range(1, pos.size):
            if colliding[i - 1]:
                m_tot = new_mass[-1] + mass[i]
                new_pos[-1] = (new_pos[-1] * new_mass[-1] + pos[i] * mass[i]) / m_tot
                new_mass[-1] = m_tot
                group.append(i)
            else:
                if len(group) > 1:
                    history.append((t, new_pos[-1], tuple(group)))
                new_pos.append(pos[i])
                new_mass.append(mass[i])
                group = [i]
        if len(group) > 1:
            history.append((t, new_pos[-1], tuple(group)))
        pos, mass = np.array(new_pos), np.array(new_mass)
    return ParticleSystem(tuple(pos.tolist()), tuple(mass.tolist()), t, tuple(history))


def _evolve_quadratic(system: ParticleSystem, t_final: float) -> ParticleSystem:
    pos = np.array(system.positions, dtype=np.float64)
    mass = np.array(system.masses, dtype=np.float64)
    total = mass.sum()
    center = np.dot(mass, pos) / total
    # x_i' = -(M x_i - S) has the exact solution below; particles never meet in finite time
    pos = center + (pos - center) * np.exp(-total * (t_final - system.time))
    return ParticleSystem(tuple(pos.tolist()), tuple(mass.tolist()), t_final, system.history)


def particle_evolve(system: ParticleSystem, potential: Potential, t_final: float) -> ParticleSystem:
    """Exact evolution of atomic data under ``x_i' = -sum_{j != i} m_j W'(x_i - x_j)``."""
    if t_final < system.time:
        raise InvalidParameter(f"t_final = {t_final} precedes the system time {system.time}")
    if len(system.positions) == 0:
        return ParticleSystem((), (), t_final, system.history)
    if potential.name == "newtonian":
        return _evolve_newtonian(system, t_final)
    if potential.name == "quadratic":
        return _evolve_quadratic(system, t_final)
    raise NotImplementedError(f"no closed-form particle dynamics for the {potential.name} potential")


def _scale(epsilon: float, c: float) -> float:
    if not (epsilon > 0 and c > 0):
        raise InvalidParameter("epsilon and c must be positive")
    return 4.0 * epsilon * c * c


def stationary_density(x, epsilon: float, c: float):
    """Pointwise equilibrium ``(1 - tanh^2(x / (4 eps c^2))) / (8 eps c^2)`` of the Newtonian relaxation system."""
    s = _scale(epsilon, c)
    th = np.tanh(np.asarray(x, dtype=np.float64) / s)
    return (1.0 - th * th) / (2.0 * s)


def stationary_profile(grid: Grid, epsilon: float, c: float) -> np.ndarray:
    """Exact cell averages of :func:`stationary_density` (its CDF is ``(1 + tanh(x/s)) / 2``)."""
    s = _scale(epsilon, c)
    cdf = 0.5 * np.tanh(grid.edges / s)
    return np.diff(cdf) / grid.dx


def stationary_ghosts(grid: Grid, epsilon: float, c: float) -> GhostData:
    """Ghost-cell data from the equilibrium, whose flux vanishes identically."""
    padded = grid.extended(left=1, right=1)
    rho = stationary_profile(padded, epsilon, c)
    return GhostData(rho_left=float(rho[0]), sigma_left=0.0, rho_right=float(rho[-1]), sigma_right=0.0)


def brute_force_convolution(rho, grid: Grid, potential: Potential) -> np.ndarray:
    """Plain double loop for ``a_j = -sum_{k != j} W'(x_j - x_k) rho_k dx``."""
    rho = [float(r) for r in rho]
    if len(rho) != grid.n_cells:
        raise InvalidParameter("density length does not match the grid")
    x = [grid.x_min + (j + 0.5) * grid.dx for j in range(grid.n_cells)]
    out = []
    for j in range(grid.n_cells):
        acc = 0.0
        for k in range(grid.n_cells):
            if k != j:
                acc += float(potential.derivative(x[j] - x[k])) * rho[k] * grid.dx
        out.append(-acc)
    return np.array(out)
