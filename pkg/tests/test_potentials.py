import numpy as np
import pytest

from aggrelax.errors import InvalidParameter
from aggrelax.potentials import UndefinedPoint, by_name, newtonian, quadratic


def test_newtonian_values():
    w = newtonian()
    assert w.derivative(0.3) == 0.5
    assert w.derivative(-2.0) == -0.5
    assert w.a_inf == 0.5 and w.pointy
    with pytest.raises(UndefinedPoint):
        w.derivative(0.0)
    with pytest.raises(UndefinedPoint):
        w.derivative(np.array([1.0, 0.0]))


def test_quadratic_values():
    w = quadratic(2.0)
    assert w.derivative(0.3) == 0.3
    assert w.derivative(0.0) == 0.0
    assert w.a_inf == 2.0 and not w.pointy
    assert by_name("quadratic", -1.0, 1.0).a_inf == 2.0
    with pytest.raises(InvalidParameter):
        quadratic(0.0)
    with pytest.raises(InvalidParameter):
        by_name("morse", -1.0, 1.0)


@pytest.mark.parametrize("w", [newtonian(), quadratic(2.0)], ids=["newtonian", "quadratic"])
def test_derivative_odd_and_bounded(w, rng):
    x = rng.uniform(-2.0, 2.0, 1000)
    x = x[x != 0]
    assert np.max(np.abs(w.derivative(x) + w.derivative(-x))) <= 1e-12
    assert np.max(np.abs(w.derivative(x))) <= w.a_inf
