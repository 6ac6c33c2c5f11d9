import math

import pytest

from towlab.analysis.regularity import harnack_ratio, lipschitz_quotient
from towlab.dpp.elliptic import solve
from towlab.errors import ReliabilityWarning
from towlab.geometry.domain import Interval
from towlab.geometry.lattice import LatticeField, build_lattice
from towlab.geometry.params import GameParams
from towlab.geometry.payoffs import Linear, Step


@pytest.fixture
def lattice():
    return build_lattice(Interval(0.0, 1.0), 0.1, refinement=4)


def test_harnack_of_a_constant_is_one(lattice):
    field = LatticeField.from_function(lattice, lambda pts: 2.0)
    assert harnack_ratio(field, [0.5], 0.1) == 1.0


def test_harnack_of_a_linear_field(lattice):
    field = LatticeField.from_function(lattice, lambda pts: 1.0 + pts[:, 0])
    ratio = harnack_ratio(field, [0.5], 0.2)
    assert 1.675 / 1.325 - 1e-12 <= ratio <= 1.7 / 1.3 + 1e-12


def test_harnack_of_a_vanishing_field(lattice):
    field = LatticeField.from_function(lattice, lambda pts: 0.0)
    with pytest.warns(ReliabilityWarning):
        assert math.isinf(harnack_ratio(field, [0.5], 0.1))


def test_harnack_rejects(lattice):
    negative = LatticeField.from_function(lattice, lambda pts: pts[:, 0] - 0.5)
    with pytest.raises(ValueError, match="nonnegative"):
        harnack_ratio(negative, [0.5], 0.1)
    constant = LatticeField.from_function(lattice, lambda pts: 1.0)
    with pytest.raises(ValueError, match="inside the domain"):
        harnack_ratio(constant, [0.5], 0.3)
    with pytest.raises(ValueError, match="positive"):
        harnack_ratio(constant, [0.5], 0.0)
    with pytest.raises(ValueError, match="Dimension"):
        harnack_ratio(constant, [0.5, 0.5], 0.1)


def test_lipschitz_quotient_of_a_linear_field():
    lattice = build_lattice(Interval(0.0, 4.0), 0.1, refinement=4)
    field = LatticeField.from_function(lattice, lambda pts: pts[:, 0])
    quotient = lipschitz_quotient(field, [2.0], 0.15)
    # slope 1, oscillation about 1.8 over B_0.9(2)
    assert 0.15 / 1.85 <= quotient <= 0.15 / 1.75


def test_lipschitz_quotient_edge_cases():
    lattice = build_lattice(Interval(0.0, 4.0), 0.1, refinement=4)
    constant = LatticeField.from_function(lattice, lambda pts: 3.0)
    assert lipschitz_quotient(constant, [2.0], 0.15) == 0.0
    with pytest.raises(ValueError, match="r > epsilon"):
        lipschitz_quotient(constant, [2.0], 0.05)
    with pytest.raises(ValueError, match="B_10r"):
        lipschitz_quotient(constant, [2.0], 0.3)


@pytest.mark.slow
def test_regularity_stays_bounded_as_epsilon_shrinks():
    domain = Interval(0.0, 4.0)
    quotients = []
    for epsilon in (0.1, 0.05, 0.025):
        params = GameParams(1, 3.0, epsilon)
        field, report = solve(build_lattice(domain, epsilon, refinement=4), Step(2.0), params, tol=1e-9)
        assert report.converged
        quotients.append(lipschitz_quotient(field, [2.0], 0.15))
        positive, _ = solve(field.lattice, Linear(offset=1.0), params, tol=1e-9)
        assert harnack_ratio(positive, [2.0], 0.5) < 3.5 / 2.5 + 1e-6
    assert max(quotients) < 10.0


@pytest.mark.slow
def test_harnack_ratio_of_a_step_payoff_settles_under_refinement():
    # the limit is 0.74 / 0.26; the strip offset keeps the discrete ratio below it
    ratios = []
    for epsilon in (0.1, 0.05, 0.025):
        params = GameParams(1, 3.0, epsilon)
        field, report = solve(build_lattice(Interval(0.0, 1.0), epsilon, refinement=4), Step(0.5), params,
                              tol=1e-10)
        assert report.converged
        ratios.append(harnack_ratio(field, [0.5], 0.24))
    assert ratios[0] < ratios[1] < ratios[2] < 0.74 / 0.26
