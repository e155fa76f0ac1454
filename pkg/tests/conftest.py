import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from aggrelax.mesh import Grid, State
from aggrelax.potentials import newtonian, quadratic

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["newtonian", "quadratic"])
def potential(request):
    return newtonian() if request.param == "newtonian" else quadratic(2.0)


def random_state(rng, n, pad=2, sigma_scale=0.5):
    """Probability density on [-1, 1] with ``pad`` empty cells at each end and |sigma| <= sigma_scale*rho."""
    grid = Grid(-1.0, 1.0, n)
    rho = np.zeros(n)
    rho[pad:n - pad] = rng.random(n - 2 * pad) ** 2
    rho /= rho.sum() * grid.dx
    sigma = rng.uniform(-1.0, 1.0, n) * sigma_scale * rho
    return grid, State(rho, sigma)
