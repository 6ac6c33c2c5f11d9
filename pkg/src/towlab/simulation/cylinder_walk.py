"""
Cylinder walk.

A point (x, y) with x in R^n starts at (0, ell) inside the cylinder B_2r x (0, 2r + ell).
Each round it moves down by epsilon with probability alpha/2, up by epsilon with
probability alpha/2, or takes a uniform step of radius epsilon in x with probability beta.
The walk stops when it leaves the cylinder; the bottom exit probability and the exit time
feed the Lipschitz estimates for the game.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from ..geometry.params import probabilities
from .game import summarize
from .sampling import mean_and_error, run_trials, sample_uniform_ball, trial_rng

BOTTOM = 'bottom'
TOP = 'top'
SIDE = 'side'
CAPPED = 'capped'


@dataclass(frozen=True)
class CylinderConfig:
    """
    Attributes:
        r (float): Radius scale; the base ball has radius 2r.
        ell (float): Starting height.
        epsilon (float): Step size.
        n (int): Base dimension.
        alpha (float): Probability of a vertical move (split evenly up and down).
        beta (float): Probability of a horizontal ball step.
    """
    r: float
    ell: float
    epsilon: float
    n: int = 1
    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if not self.ell > 0:
            raise ValueError(f"The start height ell must be positive, got {self.ell}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"Base dimension n must be a positive integer, got {self.n}")
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1) or abs(self.alpha + self.beta - 1) > 1e-12:
            raise ValueError(f"Need alpha, beta in [0, 1] with alpha + beta = 1, got ({self.alpha}, {self.beta})")

    @classmethod
    def from_exponent(cls, r, ell, epsilon, n, p):
        """Probabilities of the game with exponent p in dimension n."""
        alpha, beta = probabilities(p, n)
        return cls(r, ell, epsilon, n, alpha, beta)

    @property
    def height(self):
        return 2 * self.r + self.ell

    @property
    def round_cap(self):
        return int(math.ceil(1e4 * (self.r / self.epsilon) ** 2))

    def with_ell(self, ell):
        return CylinderConfig(self.r, ell, self.epsilon, self.n, self.alpha, self.beta)


@dataclass
class CylinderExit:
    """Exit face, rounds walked, final height and (optionally) heights at requested rounds."""
    face: str
    rounds: int
    height: float
    trace: tuple = ()


def cylinder_walk(config, rng, round_cap=None, trace_rounds=()):
    """
    Runs one cylinder walk.

    Args:
        config (CylinderConfig): Walk parameters.
        rng (Generator): Random generator.
        round_cap (int): Safety cap, defaults to 1e4 * (r/epsilon)^2.
        trace_rounds (tuple): Rounds j at which to record the stopped height y_min(j, tau).

    Returns:
        CylinderExit: face is bottom (y <= 0), top, side or capped.
    """
    cap = config.round_cap if round_cap is None else int(round_cap)
    x = np.zeros(config.n)
    steps_up = 0
    height = config.ell
    trace = {}
    wanted = set(trace_rounds)
    rounds = 0
    face = CAPPED
    while rounds < cap:
        u = rng.random()
        if u < config.alpha / 2.0:
            steps_up -= 1
        elif u < config.alpha:
            steps_up += 1
        else:
            x = sample_uniform_ball(rng, x, config.epsilon)
        rounds += 1
        # heights live on the grid ell + j*epsilon
        height = round(config.ell + steps_up * config.epsilon, 12)
        if rounds in wanted:
            trace[rounds] = height
        if height <= 0:
            face = BOTTOM
        elif height >= round(config.height, 12):
            face = TOP
        elif np.linalg.norm(x) >= 2 * config.r:
            face = SIDE
        else:
            continue
        break
    stopped = tuple(trace.get(j, height) for j in trace_rounds)
    return CylinderExit(face, rounds, height, stopped)


def _walk_trial(trial, config, master_seed, round_cap, trace_rounds):
    return cylinder_walk(config, trial_rng(master_seed, trial), round_cap, trace_rounds)


def run_walks(config, trials, master_seed, round_cap=None, trace_rounds=(), threads=1, progress=False):
    """All trials of the walk, in trial order."""
    task = partial(_walk_trial, config=config, master_seed=master_seed, round_cap=round_cap,
                   trace_rounds=tuple(trace_rounds))
    return run_trials(task, trials, threads=threads, progress=progress, desc='walks')


def bottom_escape_probability(config, trials, master_seed, round_cap=None, threads=1, progress=False):
    """
    Estimates P(the walk leaves through the bottom).

    Returns:
        ValueEstimate of the bottom indicator; capped walks count as not bottom and are
        reported in ``capped_fraction``.
    """
    walks = run_walks(config, trials, master_seed, round_cap, threads=threads, progress=progress)
    hits = np.array([w.face == BOTTOM for w in walks], dtype=float)
    rounds = np.array([w.rounds for w in walks])
    capped = np.array([w.face == CAPPED for w in walks])
    return summarize(hits, rounds, capped, master_seed)


def face_frequencies(walks):
    """Share of walks per exit face."""
    faces = np.array([w.face for w in walks])
    return {face: float(np.mean(faces == face)) for face in (BOTTOM, TOP, SIDE, CAPPED)}


@dataclass
class ExitTimeReport:
    """
    Optional stopping check for M_j = y_j^2 - alpha j epsilon^2.

    Attributes:
        mean_rounds (float): E[tau'].
        rounds_std_error (float): Its standard error.
        drift (float): alpha * epsilon^2 * E[tau'].
        second_moment_gain (float): E[y_tau^2] - ell^2.
        gap_std_error (float): Standard error of the per walk gap (gain - drift).
        holds (bool): drift <= gain + 3 standard errors.
        constant (float): C = epsilon^2 E[tau'], so that E[tau'] = C epsilon^-2.
        capped_fraction (float): Share of capped walks.
    """
    mean_rounds: float
    rounds_std_error: float
    drift: float
    second_moment_gain: float
    gap_std_error: float
    holds: bool
    constant: float
    capped_fraction: float

    def as_dict(self):
        return dict(self.__dict__)


def exit_time_moment_check(config, trials, master_seed, round_cap=None, threads=1, progress=False):
    """Checks E[alpha tau' eps^2] <= E[y_tau'^2] - ell^2 and reports C = eps^2 E[tau']."""
    if not config.alpha > 0:
        raise ValueError("The exit time check needs alpha > 0")
    walks = run_walks(config, trials, master_seed, round_cap, threads=threads, progress=progress)
    rounds = np.array([w.rounds for w in walks], dtype=float)
    heights = np.array([w.height for w in walks])
    eps2 = config.epsilon ** 2
    mean_rounds, rounds_se = mean_and_error(rounds)
    gap, gap_se = mean_and_error(heights ** 2 - config.ell ** 2 - config.alpha * eps2 * rounds)
    drift = config.alpha * eps2 * mean_rounds
    gain = float(np.mean(heights ** 2)) - config.ell ** 2
    capped = float(np.mean([w.face == CAPPED for w in walks]))
    return ExitTimeReport(mean_rounds, rounds_se, drift, gain, gap_se, bool(gap >= -3 * gap_se - 1e-12),
                          exit_time_constant(mean_rounds, config.epsilon), capped)


def exit_time_constant(mean_rounds, epsilon):
    """C = epsilon^2 * E[tau']."""
    return float(mean_rounds) * epsilon ** 2


def vertical_mean_trace(config, trials, master_seed, rounds, threads=1):
    """
    Mean and standard error of the stopped height y_min(j, tau) for every j in ``rounds``.

    The vertical coordinate is a martingale, so every mean should stay at ell.
    """
    walks = run_walks(config, trials, master_seed, trace_rounds=tuple(rounds), threads=threads)
    heights = np.array([w.trace for w in walks])
    return [mean_and_error(heights[:, i]) for i in range(len(rounds))]


def fit_escape_constant(ells, r, epsilon, escape_complements):
    """
    Smallest L with 1 - P(bottom) <= L (ell + epsilon) / r across a sweep.

    Args:
        ells (array_like): Start heights.
        r (float): Radius scale.
        epsilon (float): Step size.
        escape_complements (array_like): Estimates of 1 - P(bottom), one per height.
    """
    ells = np.asarray(ells, dtype=float)
    complements = np.asarray(escape_complements, dtype=float)
    return float(np.max(complements * r / (ells + epsilon)))
