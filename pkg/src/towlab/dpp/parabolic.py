"""
Parabolic DPP for the time tracking game: every round consumes epsilon^2/2 of the
remaining time, so values on slice s only depend on slice s-1 and the solution is
obtained by one forward march over the slices.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..errors import ReliabilityWarning
from .elliptic import check_compatible, strip_values, _operator


def slice_count(horizon, epsilon):
    """Number of time slices ceil(2T/epsilon^2) + 1 (slice 0 included)."""
    return int(math.ceil(2.0 * horizon / epsilon ** 2 - 1e-9)) + 1


def slice_of(t, epsilon):
    """Slice holding time t: slice s stands for every time in ((s-1) eps^2/2, s eps^2/2]."""
    if t <= 0:
        return 0
    return int(math.ceil(2.0 * t / epsilon ** 2 - 1e-9))


@dataclass
class SpaceTimeField:
    """
    Values of the time tracking game on (slice, node) pairs.

    Attributes:
        lattice (Lattice): Spatial lattice.
        horizon (float): Final time T.
        times (ndarray): Slice times t_s = min(s * eps^2/2, T).
        values (ndarray): Shape (slices, nodes).
    """
    lattice: object
    horizon: float
    times: np.ndarray
    values: np.ndarray

    @property
    def slice_count(self):
        return len(self.times)

    def slice(self, s):
        return self.values[s]

    @property
    def final(self):
        return self.values[-1]

    def value_at(self, x, t):
        """Value at the node nearest x on the slice holding time t (clipped to [0, T])."""
        s = min(slice_of(min(t, self.horizon), self.lattice.epsilon), self.slice_count - 1)
        return float(self.values[s, self.lattice.nearest_node(x)])

    def to_frame(self):
        """Long table with columns x1..xn, t, class, value, slice-major."""
        frames = []
        for s, t in enumerate(self.times):
            frame = self.lattice.to_frame()
            frame.insert(self.lattice.dimension, 't', t)
            frame['value'] = self.values[s]
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)


def solve_parabolic(lattice, F, horizon, params):
    """
    Marches the parabolic DPP forward from the initial slice.

    Args:
        lattice (Lattice): Lattice built for ``params.epsilon``.
        F: Parabolic data, a callable F(points, t) or a constant. Slice 0 takes F(x, 0) at
            every node and every slice takes F(x, t_s) on the strip.
        horizon (float): Final time T > 0.
        params (GameParams): Game parameters.

    Returns:
        SpaceTimeField: Exact solution of the slice recursion. If T < epsilon^2/2 only the
        initial slice is returned, with a ReliabilityWarning.
    """
    check_compatible(lattice, params)
    if not horizon > 0:
        raise ValueError(f"Horizon must be positive, got {horizon}")
    eps = params.epsilon
    step = eps ** 2 / 2.0

    if callable(F):
        initial = np.broadcast_to(np.asarray(F(lattice.nodes, 0.0), dtype=float), (lattice.node_count,)).copy()
    else:
        initial = np.full(lattice.node_count, float(F))
    if not np.all(np.isfinite(initial)):
        raise ValueError("Initial data must be finite on every node")

    if horizon < step:
        warnings.warn(f"Horizon {horizon:g} is shorter than one step ({step:g}); returning the initial slice",
                      ReliabilityWarning, stacklevel=2)
        return SpaceTimeField(lattice, float(horizon), np.array([0.0]), initial[None, :])

    count = slice_count(horizon, eps)
    times = np.minimum(np.arange(count) * step, horizon)
    values = np.empty((count, lattice.node_count))
    values[0] = initial
    for s in range(1, count):
        values[s, lattice.strip] = strip_values(lattice, F, times[s])
        values[s, lattice.interior] = _operator(values[s - 1], lattice, params)
    return SpaceTimeField(lattice, float(horizon), times, values)


def parabolic_defect(field, params):
    """sup over interior nodes and slices s >= 1 of |u(x, t_s) - T(u(., t_{s-1}))(x)|."""
    lattice = field.lattice
    check_compatible(lattice, params)
    worst = 0.0
    for s in range(1, field.slice_count):
        residual = np.abs(field.values[s, lattice.interior] - _operator(field.values[s - 1], lattice, params))
        worst = max(worst, float(residual.max()) if residual.size else 0.0)
    return worst
