import math
from functools import partial

import numpy as np
import pytest

from towlab.analysis.oracles import GridSpec, OneHot, discrete_2d_value
from towlab.dpp.elliptic import solve
from towlab.dpp.parabolic import solve_parabolic
from towlab.errors import ReliabilityWarning
from towlab.geometry.domain import Ball, Box, Interval
from towlab.geometry.lattice import build_lattice
from towlab.geometry.params import GameParams
from towlab.geometry.payoffs import Constant, Linear, Step
from towlab.simulation.game import (CAPPED, EXITED, REACHED, TIME_OUT, estimate_value, play, play_reach, play_timed,
                                   reach_probability, summarize)
from towlab.simulation.sampling import trial_rng
from towlab.simulation.strategies import GreedyStrategy, PullToward, PushAway


def _agree(estimate, reference, floor=0.02):
    return abs(estimate.mean - reference) <= max(3 * estimate.std_error, floor)


def test_constant_payoff_is_exact(unit_interval):
    params = GameParams(1, 3.0, 0.1)
    sI, sII = PullToward([1.0]), PullToward([0.0])
    estimate = estimate_value([0.5], sI, sII, params, Constant(2.0), unit_interval, 200, master_seed=1)
    assert estimate.mean == 2.0
    assert estimate.std_error == 0.0
    assert estimate.ci95 == (2.0, 2.0)
    assert estimate.reliable


def test_play_records_a_consistent_trajectory(unit_interval):
    params = GameParams(1, 3.0, 0.1)
    played = play([0.5], PullToward([1.0]), PullToward([0.0]), params, Linear(), unit_interval, trial_rng(0, 0))
    assert played.end_state == EXITED
    assert len(played.positions) == played.rounds + 1
    assert len(played.toss_log) == played.rounds
    assert not unit_interval.inside(played.position)
    assert played.payoff == pytest.approx(played.position[0])
    frame = played.to_frame()
    assert list(frame.columns) == ['round', 'x1', 'toss', 't_remaining']
    assert frame['toss'].iloc[0] == 'start'


def test_grid_walk_hits_the_endpoints_exactly(unit_interval):
    params = GameParams(1, 2.0, 0.1)
    for trial in range(50):
        played = play([0.5], None, None, params, Linear(), unit_interval, trial_rng(3, trial), noise='grid')
        assert played.position[0] in (0.0, 1.0)
        assert played.payoff in (0.0, 1.0)


def test_fair_walk_from_the_midpoint(unit_interval):
    params = GameParams(1, 2.0, 0.1)
    estimate = estimate_value([0.5], None, None, params, Linear(), unit_interval, 4000, master_seed=11,
                              noise='grid')
    assert _agree(estimate, 0.5)
    assert abs(estimate.rounds_mean - 25.0) <= 4 * estimate.rounds_std_error


def test_estimate_does_not_depend_on_threads(unit_interval):
    params = GameParams(1, 3.0, 0.1)
    sI, sII = PullToward([1.0]), PullToward([0.0])
    one = estimate_value([0.3], sI, sII, params, Step(0.5), unit_interval, 700, master_seed=5, threads=1)
    two = estimate_value([0.3], sI, sII, params, Step(0.5), unit_interval, 700, master_seed=5, threads=2)
    assert one.as_dict() == two.as_dict()


def test_capped_plays_are_flagged(unit_interval):
    params = GameParams(1, 2.0, 0.1)
    with pytest.warns(ReliabilityWarning):
        estimate = estimate_value([0.5], None, None, params, Linear(), unit_interval, 20, master_seed=0, round_cap=1)
    assert estimate.capped_fraction == 1.0
    assert not estimate.valid
    assert not estimate.reliable
    played = play([0.5], None, None, params, Linear(), unit_interval, trial_rng(0, 0), round_cap=1)
    assert played.end_state == CAPPED
    assert 0.0 <= played.payoff <= 1.0


def test_start_must_be_inside(unit_interval):
    params = GameParams(1, 2.0, 0.1)
    with pytest.raises(ValueError, match="inside"):
        estimate_value([1.5], None, None, params, Linear(), unit_interval, 10, master_seed=0)
    with pytest.raises(ValueError, match="noise"):
        estimate_value([0.5], None, None, params, Linear(), unit_interval, 10, master_seed=0, noise='levy')


def test_timed_game_respects_the_round_budget(unit_interval):
    params = GameParams(1, 2.0, 0.1)
    t0 = 0.05
    budget = math.ceil(2 * t0 / 0.1 ** 2)
    for trial in range(30):
        played = play_timed([0.5], t0, None, None, params, Step(0.3), unit_interval, trial_rng(2, trial))
        assert played.rounds <= budget
        assert played.end_state in (EXITED, TIME_OUT)
        assert played.t_remaining[0] == t0
        assert played.t_remaining[-1] >= 0.0
    estimate = estimate_value([0.5], None, None, params, Step(0.3), unit_interval, 200, master_seed=2, horizon=t0)
    assert estimate.rounds_mean <= budget


def test_summarize_confidence_interval():
    estimate = summarize([0.0, 1.0, 0.0, 1.0], [3, 5, 7, 9], [False] * 4, seed=4)
    assert estimate.mean == 0.5
    lo, hi = estimate.ci95
    assert hi - estimate.mean == pytest.approx(1.96 * estimate.std_error)
    assert estimate.mean - lo == pytest.approx(1.96 * estimate.std_error)
    assert estimate.as_dict()['seed'] == 4


def test_four_neighbour_walk_matches_the_exact_solve():
    target = (4.0, 2.0)
    exact = discrete_2d_value(GridSpec(3, 3, 1.0, (0.0, 0.0), OneHot(target)))
    center = int(np.flatnonzero(np.all(exact.grid == [2.0, 2.0], axis=1))[0])
    params = GameParams(2, 2.0, 1.0)
    estimate = estimate_value([2.0, 2.0], None, None, params, OneHot(target), Box([0, 0], [4, 4]), 20000,
                              master_seed=9, noise='grid')
    assert abs(estimate.mean - exact.values[center]) <= 4 * estimate.std_error


def test_greedy_game_matches_the_dpp_value():
    domain = Interval(0.0, 1.0)
    params = GameParams(1, 3.0, 0.1)
    lattice = build_lattice(domain, 0.1, refinement=4)
    field, _ = solve(lattice, Step(0.5), params)
    sI, sII = GreedyStrategy(field, 'maximize'), GreedyStrategy(field, 'minimize')
    estimate = estimate_value([0.5], sI, sII, params, Step(0.5), domain, 3000, master_seed=21)
    assert abs(estimate.mean - field.value_at([0.5])) <= max(4 * estimate.std_error, 0.03)


@pytest.mark.slow
@pytest.mark.parametrize("p", [2.0, 3.0])
def test_game_value_equals_the_dpp_solution(p):
    domain = Interval(0.0, 1.0)
    params = GameParams(1, p, 0.1)
    field, _ = solve(build_lattice(domain, 0.1, refinement=4), Step(0.5), params)
    sI, sII = GreedyStrategy(field, 'maximize'), GreedyStrategy(field, 'minimize')
    estimate = estimate_value([0.5], sI, sII, params, Step(0.5), domain, 10 ** 5, master_seed=1, threads=4)
    assert _agree(estimate, field.value_at([0.5]))


@pytest.mark.slow
def test_exit_time_of_the_fair_walk(unit_interval):
    params = GameParams(1, 2.0, 0.1)
    estimate = estimate_value([0.5], None, None, params, Linear(), unit_interval, 10 ** 5, master_seed=3,
                              noise='grid', threads=4)
    assert estimate.rounds_mean == pytest.approx(25.0, rel=0.02)


@pytest.mark.slow
def test_noise_only_timed_game_matches_the_parabolic_march(unit_interval):
    params = GameParams(1, 2.0, 0.1)
    horizon = 0.05
    field = solve_parabolic(build_lattice(unit_interval, 0.1, refinement=8), Step(0.3), horizon, params)
    estimate = estimate_value([0.5], None, None, params, Step(0.3), unit_interval, 10 ** 5, master_seed=8,
                              horizon=horizon, threads=4)
    assert _agree(estimate, field.value_at([0.5], horizon), floor=0.03)


def test_capped_pricing_lattice_is_built_only_when_needed(unit_interval, monkeypatch):
    import towlab.simulation.game as game

    params = GameParams(1, 2.0, 0.1)
    built = []

    def counting_build(*args, **kwargs):
        built.append(args)
        return build_lattice(*args, **kwargs)

    monkeypatch.setattr(game, 'build_lattice', counting_build)
    estimate_value([0.5], None, None, params, Linear(), unit_interval, 50, master_seed=0, noise='grid')
    assert built == []
    with pytest.warns(ReliabilityWarning):
        estimate_value([0.5], None, None, params, Linear(), unit_interval, 20, master_seed=0, round_cap=1)
    assert len(built) == 1
    given = build_lattice(unit_interval, 0.1, refinement=2)
    with pytest.warns(ReliabilityWarning):
        priced = estimate_value([0.5], None, None, params, Linear(), unit_interval, 20, master_seed=0, round_cap=1,
                                lattice=given)
    assert len(built) == 1
    assert 0.0 <= priced.mean <= 1.0


@pytest.mark.parametrize("start", [0.2, 0.7])
def test_fair_walk_exits_right_with_probability_of_the_start(unit_interval, start):
    params = GameParams(1, 2.0, 0.1)
    estimate = estimate_value([start], None, None, params, Linear(), unit_interval, 4000, master_seed=13,
                              noise='grid')
    assert _agree(estimate, start)
    assert abs(estimate.rounds_mean - start * (1 - start) / 0.01) <= 4 * estimate.rounds_std_error


@pytest.mark.filterwarnings("ignore::towlab.errors.ReliabilityWarning")
def test_capped_share_shrinks_as_the_round_cap_grows(unit_interval):
    params = GameParams(1, 6.0, 0.25)
    # both players hold the token at the center, only runs of noise get it out
    holder = PullToward([0.5])
    shares = []
    for factor in (10, 100, 1000):
        estimate = estimate_value([0.5], holder, holder, params, Linear(), unit_interval, 300, master_seed=17,
                                  round_cap=factor / 0.25 ** 2)
        shares.append(estimate.capped_fraction)
    # same seeds: a play capped at a larger cap is capped at every smaller one
    assert shares == sorted(shares, reverse=True)
    assert shares[0] > 0.0
    assert shares[-1] == 0.0


@pytest.fixture
def step_field():
    domain = Interval(0.0, 1.0)
    params = GameParams(1, 3.0, 0.1)
    field, _ = solve(build_lattice(domain, 0.1, refinement=4), Step(0.5), params, tol=1e-12)
    return domain, params, field


def _tolerance(*estimates):
    return max(3 * math.sqrt(sum(e.std_error ** 2 for e in estimates)), 0.03)


@pytest.mark.parametrize("opponent", [PullToward([1.0]), PullToward([0.0]), 'greedy'])
def test_greedy_minimizer_holds_the_value_down(step_field, opponent):
    domain, params, field = step_field
    sI = GreedyStrategy(field, 'maximize') if opponent == 'greedy' else opponent
    estimate = estimate_value([0.4], sI, GreedyStrategy(field, 'minimize'), params, Step(0.5), domain, 2000,
                              master_seed=23)
    assert estimate.mean <= field.value_at([0.4]) + _tolerance(estimate)


@pytest.mark.parametrize("opponent", [PullToward([1.0]), PullToward([0.0])])
def test_greedy_maximizer_holds_the_value_up(step_field, opponent):
    domain, params, field = step_field
    estimate = estimate_value([0.6], GreedyStrategy(field, 'maximize'), opponent, params, Step(0.5), domain, 2000,
                              master_seed=29)
    assert estimate.mean >= field.value_at([0.6]) - _tolerance(estimate)


def test_greedy_game_lies_between_the_one_sided_games(step_field):
    domain, params, field = step_field
    maximize, minimize = GreedyStrategy(field, 'maximize'), GreedyStrategy(field, 'minimize')
    run = partial(estimate_value, [0.5], params=params, F=Step(0.5), domain=domain, trials=2000, master_seed=31)
    lower = run(sI=PullToward([0.0]), sII=minimize)
    both = run(sI=maximize, sII=minimize)
    upper = run(sI=maximize, sII=PullToward([1.0]))
    assert lower.mean <= both.mean + 3 * math.hypot(lower.std_error, both.std_error)
    assert both.mean <= upper.mean + 3 * math.hypot(both.std_error, upper.std_error)
    assert lower.mean < upper.mean


def test_reach_play_stops_near_the_target():
    params = GameParams(2, 6.0, 0.25)
    domain = Ball([0.0, 0.0], 2.0)
    target = np.array([0.5, 0.0])
    for trial in range(30):
        played = play_reach([-0.5, 0.0], target, PullToward(target), PushAway(target), params, domain,
                            trial_rng(37, trial))
        if played.end_state == REACHED:
            assert np.linalg.norm(played.position - target) < 0.25
            assert played.payoff == 1.0
        else:
            assert played.end_state == EXITED
            assert not domain.inside(played.position)
            assert played.payoff == 0.0
    with pytest.raises(ValueError, match="Target"):
        play_reach([0.0, 0.0], [3.0, 0.0], None, None, params, domain, trial_rng(0, 0))


def test_reach_probability_at_the_target_is_one():
    estimate = reach_probability([0.5, 0.1], [0.5, 0.0], GameParams(2, 6.0, 0.25), 20, master_seed=0)
    assert estimate.mean == 1.0
    assert estimate.rounds_mean == 0.0


def test_reaching_a_point_is_easier_for_p_above_the_dimension():
    def reach(p):
        return reach_probability([-0.5, 0.0], [0.5, 0.0], GameParams(2, p, 0.25), 600, master_seed=41)
    strong, weak = reach(6.0), reach(2.0)
    assert strong.reliable and weak.reliable
    assert strong.mean > weak.mean + 3 * math.hypot(strong.std_error, weak.std_error)


def test_reach_probability_does_not_depend_on_threads():
    params = GameParams(2, 3.0, 0.25)
    one = reach_probability([-0.5, 0.0], [0.5, 0.0], params, 200, master_seed=43, threads=1)
    two = reach_probability([-0.5, 0.0], [0.5, 0.0], params, 200, master_seed=43, threads=2)
    assert one.as_dict() == two.as_dict()


@pytest.mark.slow
@pytest.mark.parametrize("start", [0.2, 0.3, 0.7, 0.9])
def test_discrete_walk_hitting_law(unit_interval, start):
    params = GameParams(1, 2.0, 0.1)
    estimate = estimate_value([start], None, None, params, Linear(), unit_interval, 10 ** 5, master_seed=47,
                              noise='grid', threads=4)
    assert _agree(estimate, start, floor=0.005)


@pytest.mark.slow
def test_reach_probability_under_refinement():
    reached = {}
    for p in (2.0, 6.0):
        reached[p] = [reach_probability([-0.5, 0.0], [0.5, 0.0], GameParams(2, p, eps), 2000, master_seed=53,
                                        threads=4) for eps in (0.2, 0.1, 0.05)]
    # p > n: bounded below uniformly in epsilon
    strong = [e.mean for e in reached[6.0]]
    assert min(strong) >= 0.3
    assert strong[-1] >= 0.7 * strong[0]
    # p <= n: a single point is not reached with uniform probability
    coarse, fine = reached[2.0][0], reached[2.0][-1]
    assert fine.mean < coarse.mean - 3 * math.hypot(coarse.std_error, fine.std_error)
