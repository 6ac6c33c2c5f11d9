"""
Regularity diagnostics on solved DPP fields: Harnack ratios and the asymptotic
Lipschitz quotient.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.spatial.distance import pdist

from ..errors import ReliabilityWarning

FLOOR = 1e-300


def _nodes_in_ball(field, center, radius):
    lattice = field.lattice
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if len(center) != lattice.dimension:
        raise ValueError(f"Dimension mismatch: center has {len(center)} coordinates, lattice is in R^{lattice.dimension}")
    return lattice.nodes_within(center, radius, closure='closed')


def harnack_ratio(field, center, rho):
    """
    max / min of a nonnegative field over the lattice nodes of B_rho(center).

    Args:
        field (LatticeField): Field, >= 0 on the ball.
        center (array_like): Ball center.
        rho (float): Radius; B_2rho(center) must lie inside the domain.

    Returns:
        float: The ratio with the min floored at 1e-300; inf (with a ReliabilityWarning)
        when the field vanishes somewhere in the ball.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if not field.lattice.domain.contains_ball(center, 2 * rho):
        raise ValueError(f"B_2rho({center}) with rho={rho:g} is not inside the domain")
    nodes = _nodes_in_ball(field, center, rho)
    if nodes.size == 0:
        raise ValueError(f"No lattice node within rho={rho:g} of {center}")
    values = field.values[nodes]
    if np.any(values < 0):
        raise ValueError("Harnack ratios need a nonnegative field on the ball")
    high, low = float(values.max()), float(values.min())
    if low == 0:
        warnings.warn(f"Field vanishes in B_rho({center}); Harnack ratio is infinite", ReliabilityWarning, stacklevel=2)
        return math.inf
    return high / max(low, FLOOR)


def lipschitz_quotient(field, z0, r):
    """
    Empirical Lipschitz constant of a field at scale r around z0.

    max over node pairs x, y in B_r(z0) with |x - y| >= epsilon of
    |u(x) - u(y)| * r / (|x - y| * osc), with osc the oscillation of u over B_6r(z0).

    Returns:
        float: 0 for a field that is constant on B_6r(z0).
    """
    lattice = field.lattice
    epsilon = lattice.epsilon
    if not r > epsilon:
        raise ValueError(f"Need r > epsilon = {epsilon:g}, got r = {r:g}")
    if not lattice.domain.contains_ball(z0, 10 * r):
        raise ValueError(f"B_10r({z0}) with r={r:g} is not inside the domain")
    wide = field.values[_nodes_in_ball(field, z0, 6 * r)]
    osc = float(wide.max() - wide.min())
    if osc == 0:
        return 0.0
    nodes = lattice.nodes_within(np.atleast_1d(np.asarray(z0, dtype=float)), r, closure='open')
    if nodes.size < 2:
        raise ValueError(f"Fewer than two lattice nodes in B_r({z0})")
    dist = pdist(lattice.nodes[nodes])
    jumps = pdist(field.values[nodes][:, None], metric='cityblock')
    far = dist >= epsilon * (1 - 1e-12)
    if not np.any(far):
        raise ValueError(f"No node pair in B_r({z0}) at distance >= epsilon")
    return float(np.max(jumps[far] / dist[far]) * r / osc)
