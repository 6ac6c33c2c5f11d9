"""
Random draws and the seeded trial runner shared by the game and the cylinder walk.

Trial i always draws from ``default_rng(SeedSequence(master_seed, spawn_key=(i,)))``, so
estimates do not depend on how many worker processes the trials are spread over.
"""
from __future__ import annotations

from functools import partial
from multiprocessing import Pool

import numpy as np
from tqdm import tqdm

CHUNK_SIZE = 256


def trial_rng(master_seed, trial):
    """Child generator of trial ``trial`` under ``master_seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(int(trial),)))


def sample_uniform_ball(rng, center, epsilon, size=None):
    """
    Uniform draw(s) from the open ball B_epsilon(center).

    Direction from a normalized Gaussian, radius epsilon * U^(1/n).

    Args:
        rng (Generator): numpy generator.
        center (array_like): Ball center, shape (n,).
        epsilon (float): Radius, > 0.
        size (int): Number of draws; None for a single point.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    n = len(center)
    count = 1 if size is None else int(size)
    direction = rng.standard_normal((count, n))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    # a zero Gaussian vector has probability zero; fall back to the first axis
    direction = np.where(norms > 0, direction / np.where(norms > 0, norms, 1.0), np.eye(1, n))
    radius = epsilon * rng.random((count, 1)) ** (1.0 / n)
    # U^(1/n) can round up to 1.0 for U close to 1
    radius = np.minimum(radius, epsilon * (1.0 - 1e-12))
    points = center + radius * direction
    return points[0] if size is None else points


def sample_grid_step(rng, center, epsilon):
    """+-epsilon along one of the n axes, each of the 2n moves with probability 1/(2n)."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    move = int(rng.integers(2 * len(center)))
    step = np.zeros_like(center)
    step[move // 2] = epsilon if move % 2 == 0 else -epsilon
    return center + step


def mean_and_error(values):
    """Sample mean and standard error (ddof = 1; zero for fewer than two values)."""
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / np.sqrt(len(values)))


def _call_trial(func, trial):
    return func(int(trial))


def run_trials(func, trials, threads=1, progress=False, desc=None):
    """
    Runs ``func(trial_index)`` for every trial and returns the results in trial order.

    Args:
        func: Picklable callable (module level function or ``functools.partial`` of one).
        trials (int): Number of trials.
        threads (int): Worker processes; 1 runs in process.
        progress (bool): Show a tqdm progress bar.
        desc (str): Progress bar label.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    indices = range(int(trials))
    if threads is None or threads <= 1:
        iterator = map(func, indices)
        return list(tqdm(iterator, total=trials, desc=desc, disable=not progress))
    with Pool(int(threads)) as pool:
        iterator = pool.imap(partial(_call_trial, func), indices, chunksize=CHUNK_SIZE)
        return list(tqdm(iterator, total=trials, desc=desc, disable=not progress))
