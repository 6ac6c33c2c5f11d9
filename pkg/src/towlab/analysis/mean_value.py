"""
Asymptotic mean value expressions

    M_eps φ(x) = alpha/2 * (max φ + min φ over the closed ball B_eps(x)) + beta * (average of φ over B_eps(x))

evaluated on closed form test functions, together with the ε² residual limits,
a finite difference oracle for the normalized p-Laplacian, and the parabolic variant
read at time t - ε²/2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd
from scipy.optimize import minimize, minimize_scalar

from ..errors import ReliabilityWarning
from ..geometry.params import probabilities
from .test_functions import normalized_operator

SUBDIVISIONS = 4


@lru_cache(maxsize=32)
def _ball_quadrature(n, m):
    h = 1.0 / m
    centers = (np.arange(2 * m) + 0.5) * h - 1.0
    cells = np.stack(np.meshgrid(*([centers] * n), indexing='ij'), axis=-1).reshape(-1, n)
    far = np.linalg.norm(np.abs(cells) + h / 2, axis=1)
    near = np.linalg.norm(np.maximum(np.abs(cells) - h / 2, 0.0), axis=1)
    full = far <= 1.0
    partial_cells = cells[~full & (near < 1.0)]

    sub = (np.arange(SUBDIVISIONS) + 0.5) * h / SUBDIVISIONS - h / 2
    sub_offsets = np.stack(np.meshgrid(*([sub] * n), indexing='ij'), axis=-1).reshape(-1, n)
    fine = (partial_cells[:, None, :] + sub_offsets[None, :, :]).reshape(-1, n)
    fine = fine[np.linalg.norm(fine, axis=1) <= 1.0]

    nodes = np.concatenate([cells[full], fine])
    weights = np.concatenate([np.full(int(full.sum()), h ** n), np.full(len(fine), (h / SUBDIVISIONS) ** n)])
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def ball_quadrature(n, m):
    """
    Midpoint rule on the unit ball of R^n.

    The cube [-1, 1]^n is cut into (2m)^n cells; cells inside the ball keep their center,
    cells crossing the sphere are subdivided and keep the sub-centers inside the ball.
    The rule is symmetric under coordinate reflections and weights sum to one.

    Args:
        n (int): Dimension.
        m (int): Cells per unit radius, >= 2.

    Returns:
        tuple: (nodes (K, n), weights (K,)), read-only.
    """
    if isinstance(m, bool) or int(m) != m or m < 2:
        raise ValueError(f"Quadrature level m must be an integer >= 2, got {m}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"Dimension n must be a positive integer, got {n}")
    nodes, weights = _ball_quadrature(int(n), int(m))
    if len(nodes) == 0:
        raise ValueError(f"Quadrature level {m} has no node inside the ball")
    return nodes, weights


def ball_average(phi, x, epsilon, m=8, t=None):
    """Average of phi over B_epsilon(x) with the level-m ball quadrature."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nodes, weights = ball_quadrature(len(x), m)
    return float(weights @ _evaluate(phi, x + epsilon * nodes, t))


def _evaluate(phi, points, t):
    return np.asarray(phi(points) if t is None else phi(points, t), dtype=float)


def _sphere_directions(n, m):
    if n == 1:
        return np.array([[-1.0], [1.0]])
    if n == 2:
        count = max(360, 32 * m)
        angles = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    count = max(2000, 64 * m * m)
    # Fibonacci lattice on S^2, other dimensions fall back to normalized Gaussians
    if n == 3:
        k = np.arange(count) + 0.5
        polar = np.arccos(1 - 2 * k / count)
        azimuth = np.pi * (1 + 5 ** 0.5) * k
        return np.column_stack([np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)])
    gauss = np.random.default_rng(0).standard_normal((count, n))
    return gauss / np.linalg.norm(gauss, axis=1, keepdims=True)


def _sphere_point(x, epsilon, angles):
    """Point on the sphere of radius epsilon around x from spherical angles (n - 1 of them)."""
    n = len(x)
    direction = np.ones(n)
    for i, angle in enumerate(angles):
        direction[i] *= math.cos(angle)
        direction[i + 1:] *= math.sin(angle)
    return x + epsilon * direction


def _to_angles(direction):
    n = len(direction)
    angles = []
    for i in range(n - 1):
        tail = np.linalg.norm(direction[i:])
        angle = math.acos(np.clip(direction[i] / tail, -1, 1)) if tail > 0 else 0.0
        if i == n - 2 and direction[-1] < 0:
            angle = 2 * math.pi - angle
        angles.append(angle)
    return np.array(angles)


@dataclass
class Extrema:
    """Closed ball maximizer and minimizer with their values."""
    max_point: np.ndarray
    max_value: float
    min_point: np.ndarray
    min_value: float


def _refine(phi, x, epsilon, start, sign, t, n, m):
    """Polishes a scan candidate; sign = +1 minimizes phi, -1 maximizes it."""
    def objective_point(y):
        return sign * float(_evaluate(phi, y[None, :], t)[0])

    on_sphere = abs(np.linalg.norm(start - x) - epsilon) <= 1e-12 * max(1.0, epsilon)
    best_point, best_value = start, objective_point(start)
    if n == 1:
        res = minimize_scalar(lambda s: objective_point(np.array([s])), bounds=(x[0] - epsilon, x[0] + epsilon),
                              method='bounded', options={'xatol': 1e-12 * max(1.0, epsilon)})
        candidates = [np.array([res.x])]
    elif on_sphere and n == 2:
        theta = _to_angles((start - x) / epsilon)[0]
        width = 2 * np.pi / max(360, 32 * m)
        res = minimize_scalar(lambda a: objective_point(_sphere_point(x, epsilon, [a])),
                              bounds=(theta - width, theta + width), method='bounded', options={'xatol': 1e-10})
        candidates = [_sphere_point(x, epsilon, [res.x])]
    elif on_sphere:
        res = minimize(lambda a: objective_point(_sphere_point(x, epsilon, a)), _to_angles((start - x) / epsilon),
                       method='Nelder-Mead', options={'xatol': 1e-10, 'fatol': 1e-14})
        candidates = [_sphere_point(x, epsilon, res.x)]
    else:
        def projected(y):
            gap = y - x
            norm = np.linalg.norm(gap)
            return x + gap * (epsilon / norm) if norm > epsilon else y
        res = minimize(lambda y: objective_point(projected(y)), start, method='Nelder-Mead',
                       options={'xatol': 1e-10 * max(1.0, epsilon), 'fatol': 1e-14})
        candidates = [projected(res.x)]
    for point in candidates:
        value = objective_point(point)
        if value < best_value:
            best_point, best_value = point, value
    return best_point, sign * best_value


def locate_extrema(phi, x, epsilon, m=8, t=None):
    """
    Maximizer and minimizer of phi over the closed ball B_epsilon(x).

    Scans the level-m quadrature nodes, the center and a dense set of sphere points,
    then refines the best candidates (bounded scalar search on the circle in 2D,
    Nelder-Mead otherwise).
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(x)
    nodes, _ = ball_quadrature(n, m)
    scan = np.concatenate([x[None, :], x + epsilon * nodes, x + epsilon * _sphere_directions(n, m)])
    values = _evaluate(phi, scan, t)
    hi, lo = int(np.argmax(values)), int(np.argmin(values))
    max_point, max_value = _refine(phi, x, epsilon, scan[hi], -1.0, t, n, m)
    min_point, min_value = _refine(phi, x, epsilon, scan[lo], 1.0, t, n, m)
    return Extrema(max_point, max(max_value, float(values[hi])), min_point, min(min_value, float(values[lo])))


def mv_value(phi, x, epsilon, p, n=None, m=8, t=None, analytic_extrema=False):
    """
    The asymptotic mean value expression of phi at x.

    Args:
        phi (TestFunction): Function evaluated on (N, n) stacks (and time t if given).
        x (array_like): Point.
        epsilon (float): Ball radius.
        p (float): Exponent, 1 < p <= inf; p = inf returns (max + min)/2.
        n (int): Dimension, defaults to len(x).
        m (int): Quadrature level.
        t (float): Time at which phi is read, for time dependent functions.
        analytic_extrema (bool): Use ``phi.analytic_extrema`` for max and min.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(x) if n is None else n
    if n != len(x):
        raise ValueError(f"Dimension mismatch: n={n} but x has {len(x)} coordinates")
    alpha, beta = probabilities(p, n)
    if alpha == 0:
        return ball_average(phi, x, epsilon, m, t)
    if analytic_extrema:
        if not hasattr(phi, 'analytic_extrema'):
            raise ValueError(f"{phi!r} has no closed form extrema")
        high, low = phi.analytic_extrema(x, epsilon)
    else:
        extrema = locate_extrema(phi, x, epsilon, m, t)
        high, low = extrema.max_value, extrema.min_value
    if beta == 0:
        return 0.5 * (high + low)
    return 0.5 * alpha * (high + low) + beta * ball_average(phi, x, epsilon, m, t)


def mv_residual(phi, x, epsilon, p, n=None, m=8, analytic_extrema=False):
    """mv_value - phi(x)."""
    return mv_value(phi, x, epsilon, p, n, m, analytic_extrema=analytic_extrema) - float(
        _evaluate(phi, np.atleast_2d(np.asarray(x, dtype=float)), None)[0])


def parabolic_mv_residual(u, x, t, epsilon, p, n=None, m=8):
    """Mean value expression of u(., t - eps^2/2) at x minus u(x, t)."""
    earlier = t - epsilon ** 2 / 2.0
    if earlier < 0:
        raise ValueError(f"Need t >= epsilon^2/2 = {epsilon ** 2 / 2:g}, got t = {t:g}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return mv_value(u, x, epsilon, p, n, m, t=earlier) - float(_evaluate(u, x[None, :], t)[0])


def fd_derivatives(phi, x, h_fd=1e-4, t=None):
    """Central difference gradient and Hessian of phi at x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(x)
    eye = np.eye(n) * h_fd
    center = float(_evaluate(phi, x[None, :], t)[0])
    plus = _evaluate(phi, x + eye, t)
    minus = _evaluate(phi, x - eye, t)
    grad = (plus - minus) / (2 * h_fd)
    hess = np.diag((plus - 2 * center + minus) / h_fd ** 2)
    for i in range(n):
        for j in range(i + 1, n):
            corners = np.array([x + eye[i] + eye[j], x + eye[i] - eye[j], x - eye[i] + eye[j], x - eye[i] - eye[j]])
            v = _evaluate(phi, corners, t)
            hess[i, j] = hess[j, i] = (v[0] - v[1] - v[2] + v[3]) / (4 * h_fd ** 2)
    return grad, hess


def fd_normalized_p_laplacian(phi, x, p, n=None, h_fd=1e-4, threshold=1e-8, t=None):
    """
    Finite difference Δφ + (p-2) Δ_∞^N φ at x (Δ_∞^N φ alone for p = inf).

    Raises:
        ValueError: if |∇φ(x)| <= threshold and p != 2 (normalized operator undefined).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if n is not None and n != len(x):
        raise ValueError(f"Dimension mismatch: n={n} but x has {len(x)} coordinates")
    grad, hess = fd_derivatives(phi, x, h_fd, t)
    if p != 2 and np.linalg.norm(grad) <= threshold:
        raise ValueError(f"Gradient {np.linalg.norm(grad):.3e} below threshold at {x}; "
                         "the normalized operator is undefined there")
    return normalized_operator(grad, hess, p)


def limit_of_residual(phi, x, p, n=None):
    """Expected lim residual/eps^2 = beta * (Δφ + (p-2) Δ_∞^N φ) / (2 (n+2)), via the fd oracle."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(x) if n is None else n
    _, beta = probabilities(p, n)
    if math.isinf(p):
        return 0.5 * fd_normalized_p_laplacian(phi, x, p)
    return beta * fd_normalized_p_laplacian(phi, x, p) / (2.0 * (n + 2))


@dataclass
class MeanValueLimit:
    """
    Extrapolated limit of residual/eps^2.

    Attributes:
        limit (float): Extrapolated value; the last ratio when no extrapolation was possible
            because the ratios had already settled, nan for non-monotone tables.
        order (float): Observed convergence order (nan if not extrapolated).
        extrapolated (bool): True if Richardson extrapolation was applied.
        table (DataFrame): phi, x1..xn, p, epsilon, residual, residual_over_eps2.
    """
    limit: float
    order: float
    extrapolated: bool
    table: pd.DataFrame

    def as_dict(self):
        return {'limit': self.limit, 'order': self.order, 'extrapolated': self.extrapolated,
                'epsilons': self.table['epsilon'].tolist(),
                'residual_over_eps2': self.table['residual_over_eps2'].tolist()}


def richardson(epsilons, ratios):
    """
    Richardson extrapolation of a geometric epsilon sequence from its last three ratios.

    Returns:
        tuple: (limit, order), or (nan, nan) when the order cannot be estimated.
    """
    e = np.asarray(epsilons, dtype=float)[-3:]
    q = np.asarray(ratios, dtype=float)[-3:]
    rho = e[0] / e[1]
    if not math.isclose(rho, e[1] / e[2], rel_tol=1e-9):
        raise ValueError("Richardson extrapolation needs a geometric epsilon sequence")
    d1, d2 = q[1] - q[0], q[2] - q[1]
    if d1 == 0 or d2 == 0 or np.sign(d1) != np.sign(d2) or abs(d2) >= abs(d1):
        return math.nan, math.nan
    order = math.log(abs(d1 / d2)) / math.log(rho)
    return float(q[2] + d2 / (rho ** order - 1.0)), float(order)


def mv_limit(phi, x, p, epsilons, n=None, m=8, analytic_extrema=False):
    """
    Limit of residual/eps^2 as eps -> 0 from a decreasing geometric epsilon sequence.

    Settled sequences return their last ratio; monotone ones are Richardson extrapolated
    with the observed order of the last three values; non-monotone ones return the raw
    table with a ReliabilityWarning.
    """
    epsilons = [float(e) for e in epsilons]
    if len(epsilons) < 3:
        raise ValueError("mv_limit needs at least 3 epsilon values")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilon values must be strictly decreasing")
    residuals = [mv_residual(phi, x, eps, p, n, m, analytic_extrema) for eps in epsilons]
    ratios = np.array(residuals) / np.array(epsilons) ** 2
    point = np.atleast_1d(np.asarray(x, dtype=float))
    table = pd.DataFrame({'phi': phi.describe(), **{f"x{i + 1}": c for i, c in enumerate(point)}, 'p': float(p),
                          'epsilon': epsilons, 'residual': residuals, 'residual_over_eps2': ratios})

    diffs = np.diff(ratios)
    if np.all(np.abs(diffs) <= 1e-9 * max(1.0, float(np.max(np.abs(ratios))))):
        return MeanValueLimit(float(ratios[-1]), math.nan, False, table)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        warnings.warn("residual/eps^2 is not monotone in epsilon; no extrapolation", ReliabilityWarning, stacklevel=2)
        return MeanValueLimit(math.nan, math.nan, False, table)
    limit, order = richardson(epsilons, ratios)
    if math.isnan(limit):
        warnings.warn("residual/eps^2 differences do not shrink; no extrapolation", ReliabilityWarning, stacklevel=2)
        return MeanValueLimit(math.nan, math.nan, False, table)
    return MeanValueLimit(limit, order, True, table)
