"""
Elliptic dynamic programming principle

    u(x) = alpha/2 * (max u + min u) + beta * mean u        (over the epsilon ball)

on the interior nodes of a lattice, with u = F on the strip. Solutions are found by the
monotone fixed point iteration u_{j+1} = T(u_j) started from u_0 = inf F.
"""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, asdict

import numpy as np

from ..errors import ConvergenceWarning
from ..geometry.lattice import LatticeField

METHODS = ['jacobi', 'gauss-seidel']


@dataclass
class SolveReport:
    """
    Outcome of an iterative DPP solve.

    Attributes:
        sweeps (int): Number of sweeps performed after initialization.
        final_defect (float): sup-norm DPP residual of the returned field.
        converged (bool): True if the tolerance was met before max_sweeps.
        wall_time (float): Seconds spent in the solve.
        tolerance (float): Requested tolerance.
        method (str): 'jacobi' or 'gauss-seidel'.
    """
    sweeps: int
    final_defect: float
    converged: bool
    wall_time: float
    tolerance: float = 1e-10
    method: str = 'jacobi'

    def as_dict(self):
        d = asdict(self)
        d['wall_time_s'] = d.pop('wall_time')
        return d


def check_compatible(lattice, params):
    """Raises if the lattice was built for another epsilon or dimension than params."""
    if params.n != lattice.dimension:
        raise ValueError(f"Dimension mismatch: params n={params.n}, lattice in R^{lattice.dimension}")
    if not np.isclose(params.epsilon, lattice.epsilon, rtol=1e-12, atol=0):
        raise ValueError(f"Lattice was built for epsilon={lattice.epsilon:g}, params use {params.epsilon:g}")
    if not params.beta > 0:
        raise ValueError("The DPP needs beta > 0 (p < inf)")


def strip_values(lattice, F, t=None):
    """
    Evaluates boundary data on the strip nodes.

    Args:
        lattice (Lattice): The lattice.
        F: A callable on (N, n) points (called as F(points, t) when t is given), an array
            with one value per strip node, or an array with one value per node.
        t (float): Optional time passed to callable data.

    Returns:
        ndarray: One finite value per strip node.
    """
    nodes = lattice.nodes[lattice.strip]
    if callable(F):
        values = F(nodes) if t is None else F(nodes, t)
    else:
        values = np.asarray(F, dtype=float)
        if values.ndim == 0:
            values = np.full(len(nodes), float(values))
        elif values.shape == (lattice.node_count,):
            values = values[lattice.strip]
    values = np.broadcast_to(np.asarray(values, dtype=float), (len(nodes),)).copy()
    if not np.all(np.isfinite(values)):
        raise ValueError("Boundary data must be finite on every strip node")
    return values


def interior_values(lattice, f):
    """Evaluates a running payoff (callable, scalar or per-interior-node array) on interior nodes."""
    nodes = lattice.nodes[lattice.interior]
    values = f(nodes) if callable(f) else np.asarray(f, dtype=float)
    values = np.broadcast_to(np.asarray(values, dtype=float), (len(nodes),)).copy()
    if not np.all(np.isfinite(values)):
        raise ValueError("Running payoff must be finite on every interior node")
    return values


def _operator(values, lattice, params):
    """T applied to a node value array, returned for interior nodes only."""
    stencil = values[lattice.neighbor_table]
    result = params.beta * stencil.mean(axis=1)
    if params.alpha != 0:
        result = result + 0.5 * params.alpha * (stencil.max(axis=1) + stencil.min(axis=1))
    return result


def apply_T(field, params, running=None):
    """
    One Jacobi sweep of the DPP operator.

    Every interior value is recomputed from the INPUT field's values on its open ball
    stencil; strip values are copied unchanged.

    Args:
        field (LatticeField): Input field.
        params (GameParams): Game parameters, epsilon must match the lattice.
        running (ndarray): Optional per-interior-node running payoff already scaled by epsilon^2.

    Returns:
        LatticeField: T(field).
    """
    lattice = field.lattice
    check_compatible(lattice, params)
    if lattice.neighbor_table.shape[1] == 0:
        raise ValueError("Interior nodes have empty neighbor sets; refine the lattice")
    out = field.values.copy()
    update = _operator(field.values, lattice, params)
    out[lattice.interior] = update if running is None else update + running
    return LatticeField(lattice, out)


def defect(field, params, running=None):
    """sup over interior nodes of |u - T(u)|."""
    lattice = field.lattice
    check_compatible(lattice, params)
    update = _operator(field.values, lattice, params)
    if running is not None:
        update = update + running
    residual = np.abs(field.values[lattice.interior] - update)
    return float(residual.max()) if residual.size else 0.0


def _gauss_seidel_sweep(values, lattice, params, running):
    """In place sweep in node order; returns the sup-norm change."""
    table = lattice.neighbor_table
    change = 0.0
    for row, node in enumerate(lattice.interior):
        stencil = values[table[row]]
        new = params.beta * stencil.mean() + 0.5 * params.alpha * (stencil.max() + stencil.min())
        if running is not None:
            new += running[row]
        change = max(change, abs(new - values[node]))
        values[node] = new
    return change


def default_max_sweeps(lattice):
    return int(np.ceil(50 * (lattice.domain.diameter / lattice.epsilon) ** 2))


def _iterate(lattice, F, params, tol, max_sweeps, method, running):
    check_compatible(lattice, params)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if method not in METHODS:
        raise ValueError(f"Invalid method '{method}'. Must be one of {METHODS}")
    max_sweeps = default_max_sweeps(lattice) if max_sweeps is None else int(max_sweeps)
    if max_sweeps < 1:
        raise ValueError(f"max_sweeps must be >= 1, got {max_sweeps}")

    start = time.perf_counter()
    boundary = strip_values(lattice, F)
    values = np.full(lattice.node_count, boundary.min())
    values[lattice.strip] = boundary

    sweeps = 0
    change = np.inf
    while sweeps < max_sweeps:
        sweeps += 1
        if method == 'jacobi':
            update = _operator(values, lattice, params)
            if running is not None:
                update = update + running
            change = float(np.max(np.abs(update - values[lattice.interior])))
            values[lattice.interior] = update
        else:
            change = _gauss_seidel_sweep(values, lattice, params, running)
        if change < tol:
            break

    field = LatticeField(lattice, values)
    final_defect = defect(field, params, running)
    converged = bool(change < tol and final_defect < 10 * tol)
    report = SolveReport(sweeps, final_defect, converged, time.perf_counter() - start, tol, method)
    if not converged:
        warnings.warn(f"DPP iteration stopped after {sweeps} sweeps with defect {final_defect:.3e} "
                      f"(tol {tol:g})", ConvergenceWarning, stacklevel=3)
    return field, report


def solve(lattice, F, params, tol=1e-10, max_sweeps=None, method='jacobi'):
    """
    Solves the DPP with strip data F by monotone iteration.

    Args:
        lattice (Lattice): Lattice built for ``params.epsilon``.
        F: Boundary data, see ``strip_values``.
        params (GameParams): Game parameters (2 <= p < inf).
        tol (float): Stop once the sup-norm change between sweeps is below tol.
        max_sweeps (int): Sweep limit, defaults to 50 * (diam/epsilon)^2.
        method (str): 'jacobi' (default) or the opt-in 'gauss-seidel'. Gauss-Seidel reaches
            the same fixed point but its iterates are not the monotone Jacobi sequence.

    Returns:
        tuple: (LatticeField, SolveReport). On non-convergence the last iterate is returned
        with ``report.converged = False`` and a ConvergenceWarning.
    """
    return _iterate(lattice, F, params, tol, max_sweeps, method, None)


def running_payoff_solve(lattice, F, f, params, tol=1e-10, max_sweeps=None, method='jacobi'):
    """
    Solves u = T(u) + epsilon^2 f on interior nodes with u = F on the strip.

    With f = 1/epsilon^2 the solution counts the expected number of rounds before exit.
    """
    running = params.epsilon ** 2 * interior_values(lattice, f)
    return _iterate(lattice, F, params, tol, max_sweeps, method, running)


def iterates(lattice, F, params, sweeps):
    """The first ``sweeps`` Jacobi iterates u_1..u_sweeps from u_0 = inf F, as an array (sweeps, N)."""
    check_compatible(lattice, params)
    boundary = strip_values(lattice, F)
    values = np.full(lattice.node_count, boundary.min())
    values[lattice.strip] = boundary
    history = []
    for _ in range(int(sweeps)):
        values = values.copy()
        values[lattice.interior] = _operator(values, lattice, params)
        history.append(values)
    return np.array(history)
