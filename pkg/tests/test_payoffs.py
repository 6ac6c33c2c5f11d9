import pickle

import numpy as np
import pytest

from towlab.geometry.payoffs import Caloric, Constant, Linear, Radial, Step, parse_payoff


def test_single_point_returns_float_and_stack_returns_array():
    payoff = Linear()
    assert payoff([0.3]) == 0.3
    assert isinstance(payoff([0.3]), float)
    assert list(payoff(np.array([[0.1], [0.2]]))) == [0.1, 0.2]


def test_linear_with_coefficients():
    payoff = parse_payoff('linear:1,2;0.5')
    assert payoff([1.0, 1.0]) == pytest.approx(3.5)
    with pytest.raises(ValueError, match="Dimension mismatch"):
        payoff([1.0])


def test_constant_and_step():
    assert parse_payoff('const:5')([0.7, 0.1]) == 5.0
    step = parse_payoff('step:0.5')
    assert step([0.5]) == 1.0
    assert step([0.49]) == 0.0
    assert parse_payoff('step:0,1')([1.0, -0.1]) == 0.0


def test_radial_profile():
    payoff = parse_payoff('radial:0,0;2')
    assert payoff([3.0, 4.0]) == pytest.approx(25.0)
    with pytest.raises(ValueError):
        Radial([0.0], -1.0)([0.0])


def test_caloric_is_time_dependent():
    payoff = Caloric()
    assert payoff.time_dependent
    assert payoff([1.0, 0.0], 2.0) == pytest.approx(1.0 + 4.0 / 4)
    assert payoff([1.0]) == 1.0


@pytest.mark.parametrize("text", ['cubic', 'const:', 'radial:0', 'step:a'])
def test_parse_payoff_rejects(text):
    with pytest.raises(ValueError):
        parse_payoff(text)


def test_payoffs_pickle():
    for payoff in (Constant(1), Linear([1.0, 2.0]), Step(0.2), Radial([0.0], 0.5), Caloric()):
        clone = pickle.loads(pickle.dumps(payoff))
        assert clone.describe() == payoff.describe()
