"""
Tug-of-war with noise.

Each round one categorical draw decides who moves the token: Player I with probability
alpha/2, Player II with probability alpha/2, or the noise (a uniform step in the epsilon
ball) with probability beta. The game stops when the token leaves the domain, and Player II
pays F at the exit point. The time tracking variant also stops when the remaining time,
reduced by epsilon^2/2 per round, runs out; the reach variant stops once the token comes
within epsilon of a target point.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dataclass_field
from functools import partial

import numpy as np
import pandas as pd

from ..errors import ReliabilityWarning
from ..geometry.domain import Ball
from ..geometry.lattice import build_lattice
from .sampling import mean_and_error, run_trials, sample_grid_step, sample_uniform_ball, trial_rng
from .strategies import PullToward, PushAway, checked_move

PLAYER_I = 'player_I'
PLAYER_II = 'player_II'
NOISE = 'noise'
EXITED = 'exited'
TIME_OUT = 'time_out'
CAPPED = 'capped'
REACHED = 'reached'
NOISE_MODES = ['ball', 'grid']
Z95 = 1.96


@dataclass
class Trajectory:
    """
    One play of the game.

    Attributes:
        positions (list): Token positions, starting point first.
        toss_log (list): Per round tag, one of player_I, player_II, noise.
        t_remaining (list): Remaining time after each position (timed games only).
        end_state (str): exited, time_out, reached or capped.
        rounds (int): Rounds played.
        payoff (float): Payoff of the play.
    """
    positions: list = dataclass_field(default_factory=list)
    toss_log: list = dataclass_field(default_factory=list)
    t_remaining: list = dataclass_field(default_factory=list)
    end_state: str = None
    rounds: int = 0
    payoff: float = math.nan

    @property
    def position(self):
        return self.positions[-1]

    def to_frame(self):
        """Table with columns round, x1..xn, toss, t_remaining (round 0 is the start)."""
        positions = np.array(self.positions)
        frame = pd.DataFrame(positions, columns=[f"x{i + 1}" for i in range(positions.shape[1])])
        frame.insert(0, 'round', np.arange(len(positions)))
        frame['toss'] = ['start'] + list(self.toss_log)
        frame['t_remaining'] = self.t_remaining if self.t_remaining else np.nan
        return frame


@dataclass
class ValueEstimate:
    """
    Monte Carlo estimate of a game value.

    Attributes:
        mean (float): Mean payoff.
        std_error (float): Standard error of the mean.
        trials (int): Number of plays.
        ci95 (tuple): mean -+ 1.96 std_error.
        capped_fraction (float): Share of plays stopped by the round cap.
        seed (int): Master seed.
        rounds_mean (float): Mean number of rounds.
        rounds_std_error (float): Standard error of the round count.
        valid (bool): False when every play was capped.
    """
    mean: float
    std_error: float
    trials: int
    ci95: tuple
    capped_fraction: float
    seed: int
    rounds_mean: float = math.nan
    rounds_std_error: float = math.nan
    valid: bool = True

    @property
    def reliable(self):
        return self.valid and self.capped_fraction == 0

    def as_dict(self):
        return {'mean': self.mean, 'std_error': self.std_error, 'ci95_lo': self.ci95[0], 'ci95_hi': self.ci95[1],
                'trials': self.trials, 'capped_fraction': self.capped_fraction, 'seed': self.seed,
                'rounds_mean': self.rounds_mean, 'rounds_std_error': self.rounds_std_error, 'valid': self.valid}


def summarize(payoffs, rounds, capped, seed):
    """Builds a ValueEstimate from per trial payoffs, round counts and capped flags (trial order)."""
    payoffs = np.asarray(payoffs, dtype=float)
    if np.all(payoffs == payoffs[0]):
        mean, std_error = float(payoffs[0]), 0.0
    else:
        mean, std_error = mean_and_error(payoffs)
    rounds_mean, rounds_se = mean_and_error(rounds)
    capped_fraction = float(np.mean(capped))
    valid = capped_fraction < 1.0
    if not valid:
        warnings.warn("Every trial hit the round cap; the estimate is invalid", ReliabilityWarning, stacklevel=3)
    elif capped_fraction > 0:
        warnings.warn(f"{capped_fraction:.2%} of the trials hit the round cap", ReliabilityWarning, stacklevel=3)
    return ValueEstimate(mean, std_error, len(payoffs), (mean - Z95 * std_error, mean + Z95 * std_error),
                         capped_fraction, int(seed), rounds_mean, rounds_se, valid)


def default_round_cap(domain, epsilon):
    return int(math.ceil(100 * (domain.diameter / epsilon) ** 2))


def _toss(rng, params):
    u = rng.random()
    if u < params.alpha / 2.0:
        return PLAYER_I
    if u < params.alpha:
        return PLAYER_II
    return NOISE


def _round(trajectory, position, sI, sII, params, rng, noise):
    tag = _toss(rng, params)
    if tag == PLAYER_I:
        position = checked_move(sI, trajectory, position, params.epsilon)
    elif tag == PLAYER_II:
        position = checked_move(sII, trajectory, position, params.epsilon)
    elif noise == 'grid':
        # snapped so that walks on the epsilon grid hit the boundary exactly
        position = np.round(sample_grid_step(rng, position, params.epsilon), 12)
    else:
        position = sample_uniform_ball(rng, position, params.epsilon)
    trajectory.toss_log.append(tag)
    trajectory.positions.append(position)
    trajectory.rounds += 1
    return position


def _check_start(start, domain, noise):
    start = np.atleast_1d(np.asarray(start, dtype=float))
    if len(start) != domain.dimension:
        raise ValueError(f"Dimension mismatch: start has {len(start)} coordinates, domain has {domain.dimension}")
    if not domain.inside(start):
        raise ValueError(f"Start {start} must lie inside the domain")
    if noise not in NOISE_MODES:
        raise ValueError(f"Invalid noise '{noise}'. Must be one of {NOISE_MODES}")
    return start


def nearest_strip_payoff(F, domain, epsilon, position, lattice=None):
    """F at the strip node nearest ``position`` (used for capped plays)."""
    if lattice is None:
        lattice = build_lattice(domain, epsilon, refinement=2)
    node = lattice.nearest_node(position, among=lattice.strip)
    return float(F(lattice.nodes[node]))


def _resolve_round_cap(round_cap, domain, epsilon):
    round_cap = default_round_cap(domain, epsilon) if round_cap is None else int(round_cap)
    if round_cap < 1:
        raise ValueError(f"round_cap must be >= 1, got {round_cap}")
    return round_cap


def _play(start, sI, sII, params, F, domain, rng, round_cap, noise):
    """One play; a capped play keeps a nan payoff for the caller to price."""
    position = _check_start(start, domain, noise)
    round_cap = _resolve_round_cap(round_cap, domain, params.epsilon)
    trajectory = Trajectory(positions=[position])
    while trajectory.rounds < round_cap:
        position = _round(trajectory, position, sI, sII, params, rng, noise)
        if not domain.inside(position):
            trajectory.end_state = EXITED
            trajectory.payoff = float(F(position))
            return trajectory
    trajectory.end_state = CAPPED
    return trajectory


def play(start, sI, sII, params, F, domain, rng, round_cap=None, noise='ball', lattice=None):
    """
    Plays one game from ``start``.

    Args:
        start (array_like): Starting point inside the domain.
        sI (Strategy): Player I (the maximizer).
        sII (Strategy): Player II (the minimizer).
        params (GameParams): Game parameters.
        F (callable): Payoff on points.
        domain (Domain): The domain.
        rng (Generator): Random generator of this play.
        round_cap (int): Safety cap, defaults to 100 * (diam/epsilon)^2.
        noise (str): 'ball' for uniform steps in the epsilon ball, 'grid' for +-epsilon
            axis steps (the discrete walk).
        lattice (Lattice): Lattice whose strip nodes price capped plays; built on demand.

    Returns:
        Trajectory
    """
    trajectory = _play(start, sI, sII, params, F, domain, rng, round_cap, noise)
    if trajectory.end_state == CAPPED:
        trajectory.payoff = nearest_strip_payoff(F, domain, params.epsilon, trajectory.position, lattice)
    return trajectory


def play_timed(start, t0, sI, sII, params, F, domain, rng, noise='ball'):
    """
    Plays the time tracking game from (start, t0).

    Every round consumes epsilon^2/2. The play ends on exit (payoff F(x, t)) or once the
    remaining time is <= 0 (payoff F(x, 0)); at most ceil(2 t0 / epsilon^2) rounds.
    """
    if not t0 > 0:
        raise ValueError(f"t0 must be positive, got {t0}")
    position = _check_start(start, domain, noise)
    step = params.epsilon ** 2 / 2.0
    total = int(math.ceil(t0 / step - 1e-9))
    trajectory = Trajectory(positions=[position], t_remaining=[float(t0)])
    while True:
        position = _round(trajectory, position, sI, sII, params, rng, noise)
        remaining = max(t0 - trajectory.rounds * step, 0.0) if trajectory.rounds < total else 0.0
        trajectory.t_remaining.append(remaining)
        if not domain.inside(position):
            trajectory.end_state = EXITED
            trajectory.payoff = float(F(position, remaining))
            return trajectory
        if remaining <= 0:
            trajectory.end_state = TIME_OUT
            trajectory.payoff = float(F(position, 0.0))
            return trajectory


def play_reach(start, target, sI, sII, params, domain, rng, round_cap=None, noise='ball'):
    """
    Plays until the token comes within epsilon of ``target`` or leaves the domain.

    Payoff 1 for reached, 0 for exited or capped plays.
    """
    position = _check_start(start, domain, noise)
    target = np.atleast_1d(np.asarray(target, dtype=float))
    if target.shape != position.shape:
        raise ValueError(f"Dimension mismatch: target {target.shape}, start {position.shape}")
    if not domain.inside(target):
        raise ValueError(f"Target {target} must lie inside the domain")
    round_cap = _resolve_round_cap(round_cap, domain, params.epsilon)
    trajectory = Trajectory(positions=[position], end_state=CAPPED, payoff=0.0)
    while trajectory.end_state == CAPPED:
        if np.linalg.norm(position - target) < params.epsilon:
            trajectory.end_state, trajectory.payoff = REACHED, 1.0
        elif trajectory.rounds >= round_cap:
            break
        else:
            position = _round(trajectory, position, sI, sII, params, rng, noise)
            if not domain.inside(position):
                trajectory.end_state = EXITED
    return trajectory


def _value_trial(trial, start, sI, sII, params, F, domain, master_seed, round_cap, noise, horizon):
    rng = trial_rng(master_seed, trial)
    if horizon is None:
        played = _play(start, sI, sII, params, F, domain, rng, round_cap, noise)
    else:
        played = play_timed(start, horizon, sI, sII, params, F, domain, rng, noise)
    return played.payoff, played.rounds, played.end_state == CAPPED, played.position


def estimate_value(start, sI, sII, params, F, domain, trials, master_seed, round_cap=None,
                   noise='ball', horizon=None, threads=1, progress=False, lattice=None):
    """
    Monte Carlo value of the game started at ``start``.

    Trial i plays with the generator seeded by (master_seed, i), so the estimate is
    bit-identical for any number of worker threads.

    Args:
        horizon (float): When given, plays the time tracking game from (start, horizon).
        threads (int): Worker processes.
        progress (bool): Show a progress bar.
        lattice (Lattice): Prices capped plays at its nearest strip node. A refinement 2
            lattice is built only if some play is capped and none is given.
        Other arguments as in ``play``.

    Returns:
        ValueEstimate
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    _check_start(start, domain, noise)
    if horizon is None:
        round_cap = _resolve_round_cap(round_cap, domain, params.epsilon)
    task = partial(_value_trial, start=np.atleast_1d(np.asarray(start, dtype=float)), sI=sI, sII=sII,
                   params=params, F=F, domain=domain, master_seed=master_seed, round_cap=round_cap,
                   noise=noise, horizon=horizon)
    results = run_trials(task, trials, threads=threads, progress=progress, desc='trials')
    payoffs, rounds, capped = (np.array(column) for column in list(zip(*results))[:3])
    payoffs = payoffs.astype(float)
    if capped.any():
        if lattice is None:
            lattice = build_lattice(domain, params.epsilon, refinement=2)
        for trial in np.flatnonzero(capped):
            payoffs[trial] = nearest_strip_payoff(F, domain, params.epsilon, results[trial][3], lattice)
    return summarize(payoffs, rounds, capped, master_seed)


def _reach_trial(trial, start, target, sI, sII, params, domain, master_seed, round_cap, noise):
    played = play_reach(start, target, sI, sII, params, domain, trial_rng(master_seed, trial), round_cap, noise)
    return played.payoff, played.rounds, played.end_state == CAPPED


def reach_probability(start, target, params, trials, master_seed, radius=2.0, sII=None, round_cap=None,
                      noise='ball', threads=1, progress=False):
    """
    Probability that Player I, pulling toward ``target``, brings the token within epsilon
    of it before the token leaves B_radius(0).

    A uniform lower bound on this probability as epsilon -> 0 gives Harnack's inequality
    sup u <= inf u / P for nonnegative game values; it exists for p > n only.

    Args:
        start (array_like): Starting point in B_radius(0).
        target (array_like): Point to reach, in B_radius(0).
        params (GameParams): Game parameters; the dimension is len(start).
        radius (float): Radius of the ball the game is played in.
        sII (Strategy): Player II, defaults to pushing straight away from the target.
        Other arguments as in ``estimate_value``.

    Returns:
        ValueEstimate: of the reach indicator; capped plays count as not reached.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    domain = Ball(np.zeros(params.n), radius)
    sI = PullToward(target)
    sII = PushAway(target) if sII is None else sII
    task = partial(_reach_trial, start=np.atleast_1d(np.asarray(start, dtype=float)), target=target, sI=sI,
                   sII=sII, params=params, domain=domain, master_seed=master_seed, round_cap=round_cap,
                   noise=noise)
    results = run_trials(task, trials, threads=threads, progress=progress, desc='trials')
    payoffs, rounds, capped = (np.array(column) for column in zip(*results))
    return summarize(payoffs, rounds, capped, master_seed)
