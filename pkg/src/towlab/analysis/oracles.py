"""
Exact solutions of small discrete walks, used as ground truth by the solvers and the
Monte Carlo estimators.

1D walks on an epsilon grid step +-epsilon with probability 1/2 each:
    u(x) = (u(x - eps) + u(x + eps)) / 2 + cost
2D walks on a square grid step to one of the four neighbours with probability 1/4.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import spsolve


@dataclass(frozen=True)
class DiscreteWalkSpec:
    """
    Attributes:
        a (float): Left endpoint.
        b (float): Right endpoint.
        step (float): Grid step epsilon; must divide b - a.
        payoff_a (float): Payoff at a.
        payoff_b (float): Payoff at b.
        cost (float): Running payoff collected every step.
    """
    a: float = 0.0
    b: float = 1.0
    step: float = 0.1
    payoff_a: float = 0.0
    payoff_b: float = 1.0
    cost: float = 0.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"Need a < b, got ({self.a}, {self.b})")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        cells = (self.b - self.a) / self.step
        if abs(cells - round(cells)) > 1e-9 * max(1.0, cells) or round(cells) < 2:
            raise ValueError(f"step {self.step:g} must divide b - a = {self.b - self.a:g} into at least 2 cells")

    @property
    def cells(self):
        return int(round((self.b - self.a) / self.step))

    @property
    def grid(self):
        return self.a + self.step * np.arange(self.cells + 1)


@dataclass
class DiscreteSolution:
    """Grid points and exact values (endpoints included)."""
    grid: np.ndarray
    values: np.ndarray

    def to_frame(self):
        columns = ['x1'] if self.grid.ndim == 1 else [f"x{i + 1}" for i in range(self.grid.shape[1])]
        frame = pd.DataFrame(np.reshape(self.grid, (len(self.values), -1)), columns=columns)
        frame['value'] = self.values
        return frame


def _solve_walk(spec, cost):
    interior = spec.cells - 1
    bands = np.zeros((3, interior))
    bands[0, 1:] = -0.5
    bands[1, :] = 1.0
    bands[2, :-1] = -0.5
    rhs = np.full(interior, float(cost))
    rhs[0] += 0.5 * spec.payoff_a
    rhs[-1] += 0.5 * spec.payoff_b
    values = np.concatenate([[spec.payoff_a], solve_banded((1, 1), bands, rhs), [spec.payoff_b]])
    return DiscreteSolution(spec.grid, values)


def discrete_hitting_value(spec):
    """Expected payoff of the fair +-epsilon walk stopped at the endpoints (no running cost)."""
    return _solve_walk(spec, 0.0)


def discrete_running_time(spec):
    """Solves u = (u(x - eps) + u(x + eps))/2 + cost; with cost 1 and zero payoffs this is the mean number of steps."""
    return _solve_walk(spec, spec.cost)


def expected_exit_rounds(x, a, b, epsilon):
    """Mean number of +-epsilon steps to leave (a, b) from a grid point x: (x - a)(b - x) / epsilon^2."""
    return (x - a) * (b - x) / epsilon ** 2


def gamblers_ruin_bottom(ell, height, epsilon):
    """P(a fair +-epsilon walk from ell hits 0 before height), both on the epsilon grid."""
    for name, value in (('ell', ell), ('height', height)):
        units = value / epsilon
        if abs(units - round(units)) > 1e-9 * max(1.0, units):
            raise ValueError(f"{name}={value:g} is not on the epsilon={epsilon:g} grid")
    if not 0 < ell < height:
        raise ValueError(f"Need 0 < ell < height, got ell={ell:g}, height={height:g}")
    return (height - ell) / height


@dataclass(frozen=True)
class GridSpec:
    """
    Square grid with (nx, ny) interior nodes and one boundary layer around them.

    Attributes:
        nx (int): Interior nodes along x.
        ny (int): Interior nodes along y.
        step (float): Grid spacing.
        origin (tuple): Coordinates of the lower left boundary corner.
        boundary (callable): Payoff F(points) on boundary nodes.
    """
    nx: int
    ny: int
    step: float = 1.0
    origin: tuple = (0.0, 0.0)
    boundary: object = None

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"Need at least one interior node per axis, got ({self.nx}, {self.ny})")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")

    @property
    def points(self):
        """All grid points, shape (nx + 2, ny + 2, 2)."""
        xs = self.origin[0] + self.step * np.arange(self.nx + 2)
        ys = self.origin[1] + self.step * np.arange(self.ny + 2)
        return np.stack(np.meshgrid(xs, ys, indexing='ij'), axis=-1)


def discrete_2d_value(gridspec):
    """
    Exact value of the four-neighbour walk stopped on the boundary layer.

    Returns:
        DiscreteSolution: points (N, 2) and values (N,) over the full grid, corners included
        (corners carry their boundary payoff and are never reached).
    """
    nx, ny = gridspec.nx, gridspec.ny
    points = gridspec.points
    if gridspec.boundary is None:
        raise ValueError("GridSpec needs a boundary payoff")
    values = np.asarray(gridspec.boundary(points.reshape(-1, 2)), dtype=float).reshape(nx + 2, ny + 2).copy()

    # interior unknowns, row-major over (i, j)
    lap_x = sp.diags([np.ones(nx - 1), np.ones(nx - 1)], [-1, 1], shape=(nx, nx))
    lap_y = sp.diags([np.ones(ny - 1), np.ones(ny - 1)], [-1, 1], shape=(ny, ny))
    averaging = 0.25 * (sp.kron(lap_x, sp.eye(ny)) + sp.kron(sp.eye(nx), lap_y))
    system = (sp.eye(nx * ny) - averaging).tocsc()

    rhs = np.zeros((nx, ny))
    rhs[0, :] += values[0, 1:-1]
    rhs[-1, :] += values[-1, 1:-1]
    rhs[:, 0] += values[1:-1, 0]
    rhs[:, -1] += values[1:-1, -1]
    solution = np.atleast_1d(spsolve(system, 0.25 * rhs.reshape(-1)))
    if not np.all(np.isfinite(solution)):
        raise RuntimeError("Singular four-neighbour system")
    values[1:-1, 1:-1] = solution.reshape(nx, ny)
    return DiscreteSolution(points.reshape(-1, 2), values.reshape(-1))


class OneHot:
    """Boundary payoff equal to 1 at ``target`` and 0 elsewhere."""

    def __init__(self, target, tol=1e-9):
        self.target = np.asarray(target, dtype=float)
        self.tol = tol

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        hits = (np.linalg.norm(np.atleast_2d(points) - self.target, axis=1) <= self.tol).astype(float)
        return float(hits[0]) if points.ndim == 1 else hits


def oracle_frames():
    """Every built-in fixture as a named table, for dumping to CSV."""
    frames = {
        'hitting_quarter_grid': discrete_hitting_value(DiscreteWalkSpec(0.0, 1.0, 0.25)).to_frame(),
        'surplus_of_two': discrete_running_time(DiscreteWalkSpec(-2.0, 2.0, 1.0, 0.0, 0.0, 1.0)).to_frame(),
        'running_time_tenth_grid': discrete_running_time(DiscreteWalkSpec(0.0, 1.0, 0.1, 0.0, 0.0, 1.0)).to_frame(),
        'four_neighbour_linear': discrete_2d_value(GridSpec(3, 3, 1.0, (0.0, 0.0), lambda pts: pts[:, 0])).to_frame(),
        'four_neighbour_one_hot': discrete_2d_value(GridSpec(3, 3, 1.0, (0.0, 0.0), OneHot((4.0, 2.0)))).to_frame(),
    }
    return frames

