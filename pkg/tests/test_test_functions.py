import math

import numpy as np
import pytest

from towlab.analysis.mean_value import fd_normalized_p_laplacian
from towlab.analysis.test_functions import (LIBRARY, Aronsson, CaloricQuadratic, CoordinateQuadratic, Quadratic,
                                            RadialProfile, get_test_function, normalized_operator)


def test_quadratic_operator_values():
    phi = Quadratic()
    x = np.array([0.5, 0.5])
    assert phi.expected_operator_value(x, 2.0) == pytest.approx(4.0)
    assert phi.expected_operator_value(x, 3.0) == pytest.approx(6.0)
    assert phi.expected_operator_value(x, math.inf) == pytest.approx(2.0)


def test_coordinate_quadratic_operator():
    phi = CoordinateQuadratic()
    assert phi.expected_operator_value(np.array([1.0, 0.5]), 3.0) == pytest.approx(4.0)
    assert math.isnan(phi.expected_operator_value(np.array([0.0, 0.5]), 3.0))
    assert phi.expected_operator_value(np.array([0.0, 0.5]), 2.0) == pytest.approx(2.0)


@pytest.mark.parametrize("p, n", [(3.0, 2), (4.0, 3), (1.5, 2), (math.inf, 2)])
def test_radial_profile_solves_the_equation(p, n):
    phi = RadialProfile(p=p, n=n)
    for x in phi.known_gradient_nonzero_at(n):
        assert phi.expected_operator_value(x, p) == pytest.approx(0.0, abs=1e-12)


def test_radial_profile_needs_p_different_from_n():
    with pytest.raises(ValueError, match="p != n"):
        RadialProfile(p=2.0, n=2)
    with pytest.raises(ValueError):
        RadialProfile()
    assert RadialProfile(gamma=0.5).describe() == "radial:0.5"


def test_aronsson_is_infinity_harmonic_off_the_axes():
    phi = Aronsson()
    for x in phi.known_gradient_nonzero_at(2):
        assert phi.expected_operator_value(x, math.inf) == pytest.approx(0.0, abs=1e-12)
    # not twice differentiable on the x1 axis
    assert math.isnan(phi.expected_operator_value(np.array([1.0, 0.0]), math.inf))
    with pytest.raises(ValueError, match="R\\^2"):
        phi(np.zeros((4, 3)))


@pytest.mark.parametrize("a, epsilon", [(1.0, 0.1), (1.0, 0.4), (2.5, 0.3)])
def test_aronsson_extrema_match_dense_sampling(a, epsilon):
    phi = Aronsson()
    high, low = phi.analytic_extrema([a, 0.0], epsilon)
    angles = np.linspace(0.0, 2 * np.pi, 200001)
    circle = np.column_stack([a + epsilon * np.cos(angles), epsilon * np.sin(angles)])
    values = phi(circle)
    assert values.max() <= high + 1e-12
    assert values.max() == pytest.approx(high, abs=1e-12)
    assert values.min() >= low - 1e-12
    assert values.min() == pytest.approx(low, abs=1e-8)


def test_aronsson_extrema_reject_other_points():
    with pytest.raises(ValueError):
        Aronsson().analytic_extrema([1.0, 0.2], 0.1)
    with pytest.raises(ValueError):
        Aronsson().analytic_extrema([1.0, 0.0], 1.5)


def test_caloric_quadratic_is_caloric():
    u = CaloricQuadratic()
    x, t, dt = np.array([0.3, 0.2]), 0.5, 1e-6
    u_t = (u(x, t + dt) - u(x, t - dt)) / (2 * dt)
    laplacian = fd_normalized_p_laplacian(u, x, 2.0, t=t)
    assert (len(x) + 2) * u_t == pytest.approx(laplacian, rel=1e-5)


def test_normalized_operator_at_a_critical_point():
    hess = np.diag([2.0, -1.0])
    assert math.isnan(normalized_operator(np.zeros(2), hess, 3.0))
    assert normalized_operator(np.zeros(2), hess, 2.0) == pytest.approx(1.0)


def test_library_lookup():
    assert set(LIBRARY) == {'linear', 'quadratic', 'coordinate_quadratic', 'aronsson', 'radial', 'caloric'}
    assert isinstance(get_test_function(' Aronsson '), Aronsson)
    assert get_test_function('radial', p=3.0, n=2).gamma == pytest.approx(0.5)
    with pytest.raises(ValueError, match="Unknown test function"):
        get_test_function('sombrero')
