"""Even interaction potentials W, described through their derivative W'."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidParameter


class UndefinedPoint(ValueError):
    """W' was evaluated at the origin of a pointy potential."""


@dataclass(frozen=True)
class Potential:
    name: str
    derivative_fn: Callable[[np.ndarray], np.ndarray]
    lipschitz_bound: float
    lambda_convexity: float
    pointy: bool

    def derivative(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.pointy and np.any(x == 0.0):
            raise UndefinedPoint(f"W' of the {self.name} potential is undefined at 0")
        out = self.derivative_fn(x)
        return float(out) if out.ndim == 0 else out

    @property
    def a_inf(self) -> float:
        return self.lipschitz_bound


def newtonian() -> Potential:
    """W(x) = |x|/2."""
    return Potential("newtonian", lambda x: 0.5 * np.sign(x), 0.5, 0.0, True)


def quadratic(domain_diameter: float) -> Potential:
    """W(x) = x^2/2; its Lipschitz bound is taken over differences of points in the domain."""
    if not domain_diameter > 0:
        raise InvalidParameter(f"domain diameter must be positive, got {domain_diameter!r}")
    return Potential("quadratic", lambda x: np.array(x, dtype=np.float64), float(domain_diameter), 1.0, False)


POTENTIALS = ("newtonian", "quadratic")


def by_name(name: str, x_min: float, x_max: float) -> Potential:
    if name == "newtonian":
        return newtonian()
    if name == "quadratic":
        return quadratic(x_max - x_min)
    raise InvalidParameter(f"unknown potential {name!r}; expected one of {POTENTIALS}")
