import math

import pytest
from hypothesis import given, settings, strategies as st

from towlab.geometry.params import GameParams, probabilities


def test_probabilities_known_values():
    assert probabilities(2, 3) == (0.0, 1.0)
    assert probabilities(math.inf, 2) == (1.0, 0.0)
    assert probabilities(3, 1) == pytest.approx((0.25, 0.75))
    assert probabilities(4, 2) == pytest.approx((1 / 3, 2 / 3))


@settings(max_examples=200, deadline=None)
@given(p=st.floats(2.0, 1e6), n=st.integers(1, 10))
def test_probabilities_sum_to_one(p, n):
    alpha, beta = probabilities(p, n)
    assert alpha + beta == pytest.approx(1.0, abs=1e-15)
    assert 0.0 <= alpha < 1.0
    assert beta > 0.0


@pytest.mark.parametrize("p, n", [(1.0, 1), (0.5, 2), (math.nan, 1), (3.0, 0), (3.0, 1.5)])
def test_probabilities_rejects_bad_input(p, n):
    with pytest.raises(ValueError):
        probabilities(p, n)


def test_game_params_derived_fields():
    params = GameParams(2, 4.0, 0.1)
    assert params.alpha == pytest.approx(1 / 3)
    assert params.beta == pytest.approx(2 / 3)
    assert sum(params.toss_probabilities) == pytest.approx(1.0)
    assert params.as_dict()['epsilon'] == 0.1


def test_game_params_with_epsilon_keeps_the_rest():
    params = GameParams(1, 3.0, 0.1).with_epsilon(0.05)
    assert params.epsilon == 0.05
    assert params.p == 3.0
    assert params.alpha == pytest.approx(0.25)


@pytest.mark.parametrize("p, eps", [(1.5, 0.1), (math.inf, 0.1), (3.0, 0.0), (3.0, -1.0)])
def test_game_params_rejects_game_inputs(p, eps):
    with pytest.raises(ValueError):
        GameParams(1, p, eps)


def test_game_params_mean_value_lab_accepts_any_p_above_one():
    assert GameParams(2, math.inf, 0.1, for_mean_value=True).beta == 0.0
    assert GameParams(2, 1.5, 0.1, for_mean_value=True).alpha < 0


def test_game_params_is_frozen():
    params = GameParams(1, 2.0, 0.1)
    with pytest.raises(AttributeError):
        params.p = 3.0
