"""
Lattice discretization of a domain and of functions living on it.

A lattice is a regular grid of spacing h = epsilon/k aligned with the lower corner of
the domain's bounding box. Nodes strictly inside the domain are ``interior``; nodes
outside the domain that some interior stencil reaches are ``strip`` nodes (the discrete
boundary strip where payoffs are read). Everything else is ``outside`` and is not stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd
from scipy.ndimage import binary_dilation
from scipy.spatial import cKDTree

INTERIOR = 'interior'
STRIP = 'strip'
OUTSIDE = 'outside'
NODE_CLASSES = (INTERIOR, STRIP, OUTSIDE)
CLOSURES = ['open', 'closed']


def strip_contains(domain, epsilon, x):
    """
    True iff x lies outside the closed domain and within distance epsilon of it.

    Args:
        domain (Domain): The domain.
        epsilon (float): Width of the strip, > 0.
        x (array_like): Point (n,) or stack of points (N, n).
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    inside = domain.inside(x)
    dist = domain.distance(x)
    return np.logical_and(np.logical_not(inside), np.logical_and(dist > 0, dist <= epsilon)) \
        if np.ndim(dist) else bool((not inside) and 0 < dist <= epsilon)


def stencil_offsets(radius_sq, dimension, closure='open', include_center=False):
    """
    Integer offsets o with |o|^2 < radius_sq (open) or <= radius_sq (closed), row-major order.

    radius_sq is the squared ball radius in units of the lattice spacing.
    """
    if closure not in CLOSURES:
        raise ValueError(f"Invalid closure '{closure}'. Must be one of {CLOSURES}")
    snapped = round(radius_sq)
    if abs(radius_sq - snapped) < 1e-9 * max(1.0, radius_sq):
        radius_sq = snapped
    reach = int(math.floor(math.sqrt(radius_sq) + 1e-12))
    axis = np.arange(-reach, reach + 1)
    grid = np.stack(np.meshgrid(*([axis] * dimension), indexing='ij'), axis=-1).reshape(-1, dimension)
    norms = np.sum(grid ** 2, axis=1)
    keep = norms < radius_sq if closure == 'open' else norms <= radius_sq
    if not include_center:
        keep &= norms > 0
    return grid[keep]


class Lattice:
    """
    Regular lattice covering a domain and its epsilon boundary strip.

    Attributes:
        domain (Domain): The discretized domain.
        epsilon (float): Step size the lattice was built for.
        refinement (int): k, number of lattice spacings per epsilon.
        spacing (float): h = epsilon / k.
        closure (str): 'open' or 'closed', the ball used by the DPP stencil.
        nodes (ndarray): Node coordinates (N, n), row-major over the axes.
        node_class (ndarray): Per node tag, 'interior' or 'strip'.
        grid_index (ndarray): Integer lattice coordinates of every node (N, n).
    """

    def __init__(self, domain, epsilon, refinement, closure, origin, grid_shape, grid_index, node_class):
        self.domain = domain
        self.epsilon = float(epsilon)
        self.refinement = int(refinement)
        self.spacing = self.epsilon / self.refinement
        self.closure = closure
        self.origin = np.asarray(origin, dtype=float)
        self.grid_shape = tuple(grid_shape)
        self.grid_index = np.asarray(grid_index, dtype=np.int64)
        self.node_class = np.asarray(node_class)
        # grid index `refinement` sits on the lower corner of the bounding box
        self.nodes = self.origin + (self.grid_index - self.refinement) * self.spacing
        self._index_grid = np.full(self.grid_shape, -1, dtype=np.int64)
        self._index_grid[tuple(self.grid_index.T)] = np.arange(len(self.grid_index))

    @property
    def dimension(self):
        return self.domain.dimension

    @property
    def node_count(self):
        return len(self.nodes)

    @cached_property
    def interior(self):
        """Indices of interior nodes, in node order."""
        return np.flatnonzero(self.node_class == INTERIOR)

    @cached_property
    def strip(self):
        """Indices of strip nodes, in node order."""
        return np.flatnonzero(self.node_class == STRIP)

    @cached_property
    def offsets(self):
        """DPP stencil offsets (center excluded) for the lattice's own epsilon and closure."""
        return stencil_offsets(self.refinement ** 2, self.dimension, self.closure)

    @cached_property
    def neighbor_table(self):
        """
        Node indices of the DPP stencil of every interior node, shape (n_interior, m).

        Row i belongs to ``self.interior[i]``; columns follow the row-major offset order.
        """
        coords = self.grid_index[self.interior][:, None, :] + self.offsets[None, :, :]
        table = self._index_grid[tuple(np.moveaxis(coords, -1, 0))]
        if np.any(table < 0):
            raise RuntimeError("Lattice stencil reaches a node that was not stored")
        return table

    @cached_property
    def _tree(self):
        return cKDTree(self.nodes)

    def node_index(self, grid_coords):
        """Node index for integer lattice coordinates, -1 if the node is not stored."""
        coords = np.asarray(grid_coords, dtype=np.int64)
        if np.any(coords < 0) or np.any(coords >= np.asarray(self.grid_shape)):
            return -1
        return int(self._index_grid[tuple(coords)])

    def nodes_within(self, x, radius, closure='open'):
        """Indices of stored nodes y with |y - x| < radius (open) or <= radius (closed), sorted."""
        x = np.asarray(x, dtype=float)
        candidates = np.asarray(self._tree.query_ball_point(x, r=radius), dtype=np.int64)
        if candidates.size == 0:
            return candidates
        dist = np.linalg.norm(self.nodes[candidates] - x, axis=1)
        keep = dist < radius if closure == 'open' else dist <= radius
        return np.sort(candidates[keep])

    def nearest_node(self, x, among=None):
        """Index of the stored node closest to x, optionally restricted to the index set ``among``."""
        x = np.asarray(x, dtype=float)
        if among is None:
            return int(self._tree.query(x)[1])
        among = np.asarray(among)
        return int(among[np.argmin(np.linalg.norm(self.nodes[among] - x, axis=1))])

    def classify_point(self, x):
        """Classifies an arbitrary point as interior, strip or outside (continuum strip test)."""
        if self.domain.inside(x):
            return INTERIOR
        if strip_contains(self.domain, self.epsilon, x) or self.domain.distance(x) == 0:
            return STRIP
        return OUTSIDE

    def to_frame(self, values=None):
        """Node table with columns x1..xn, class and (optionally) value."""
        frame = pd.DataFrame(self.nodes, columns=[f"x{i + 1}" for i in range(self.dimension)])
        frame['class'] = self.node_class
        if values is not None:
            frame['value'] = np.asarray(values, dtype=float)
        return frame

    def describe(self):
        return {'domain': f"{self.domain.shape}:{self.domain.describe()}", 'epsilon': self.epsilon,
                'refinement': self.refinement, 'spacing': self.spacing, 'closure': self.closure,
                'nodes': self.node_count, 'interior_nodes': len(self.interior),
                'strip_nodes': len(self.strip)}

    def __repr__(self):
        return (f"Lattice({self.domain!r}, epsilon={self.epsilon:g}, k={self.refinement}, "
                f"{len(self.interior)} interior / {len(self.strip)} strip nodes)")


def build_lattice(domain, epsilon, refinement=4, closure='open'):
    """
    Builds the lattice of spacing epsilon/refinement over a domain and its boundary strip.

    Args:
        domain (Domain): Bounded domain to discretize.
        epsilon (float): Step size of the game / DPP, > 0.
        refinement (int): k >= 2 spacings per epsilon. k = 1 is only accepted with
            ``closure='closed'``, which gives the plain epsilon-grid walk (x +- epsilon).
        closure (str): Ball used by the DPP stencil, 'open' (default) or 'closed'.

    Returns:
        Lattice: nodes enumerated row-major, classified interior/strip.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if closure not in CLOSURES:
        raise ValueError(f"Invalid closure '{closure}'. Must be one of {CLOSURES}")
    if isinstance(refinement, bool) or int(refinement) != refinement:
        raise ValueError(f"refinement must be an integer, got {refinement}")
    refinement = int(refinement)
    if refinement < 2 and not (refinement == 1 and closure == 'closed'):
        raise ValueError(f"refinement must be >= 2 (got {refinement}); open ball neighborhoods "
                         "would be empty. Use refinement=1 only with closure='closed'")
    lo, hi = domain.bounds()
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("Domain must be bounded")

    h = epsilon / refinement
    n = domain.dimension
    cells = np.ceil((hi - lo) / h - 1e-9).astype(int)
    pad = refinement
    origin = lo
    grid_shape = tuple(int(c) + 2 * pad + 1 for c in cells)

    full_index = np.stack(np.meshgrid(*[np.arange(s) for s in grid_shape], indexing='ij'),
                          axis=-1).reshape(-1, n)
    inside = domain.inside(origin + (full_index - pad) * h).reshape(grid_shape)
    if not inside.any():
        raise ValueError("No lattice node falls inside the domain; decrease epsilon or increase refinement")

    footprint = np.zeros([2 * refinement + 1] * n, dtype=bool)
    footprint[tuple((stencil_offsets(refinement ** 2, n, closure, include_center=True) + refinement).T)] = True
    reached = binary_dilation(inside, structure=footprint)
    strip = reached & ~inside

    keep = (inside | strip).reshape(-1)
    grid_index = full_index[keep]
    node_class = np.where(inside.reshape(-1)[keep], INTERIOR, STRIP)
    return Lattice(domain, epsilon, refinement, closure, origin, grid_shape, grid_index, node_class)


def ball_neighbors(lattice, node, epsilon=None, closure='open'):
    """
    Lattice nodes in the epsilon ball around an interior node, center excluded.

    Args:
        lattice (Lattice): The lattice.
        node (int): Index of an interior node.
        epsilon (float): Ball radius, defaults to the lattice's epsilon.
        closure (str): 'open' for |y - x| < epsilon, 'closed' for <= epsilon.

    Returns:
        ndarray: Node indices in deterministic (row-major) order.
    """
    if isinstance(node, bool) or int(node) != node or not 0 <= node < lattice.node_count:
        raise ValueError(f"Node {node} is outside the lattice (0..{lattice.node_count - 1})")
    node = int(node)
    if lattice.node_class[node] != INTERIOR:
        raise ValueError(f"Node {node} is a {lattice.node_class[node]} node; neighbors are defined for interior nodes")
    epsilon = lattice.epsilon if epsilon is None else float(epsilon)
    radius_sq = (epsilon / lattice.spacing) ** 2
    if radius_sq < 1 or (closure == 'open' and radius_sq <= 1 + 1e-12):
        raise ValueError(f"epsilon={epsilon:g} does not reach any neighbor at spacing {lattice.spacing:g}")
    offsets = stencil_offsets(radius_sq, lattice.dimension, closure)
    coords = lattice.grid_index[node] + offsets
    found = [lattice.node_index(c) for c in coords]
    return np.asarray([i for i in found if i >= 0], dtype=np.int64)


@dataclass
class LatticeField:
    """
    Values of a function on the nodes of a lattice.

    Attributes:
        lattice (Lattice): The carrier lattice.
        values (ndarray): One finite real per node.
    """
    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float)
        if self.values.shape != (self.lattice.node_count,):
            raise ValueError(f"Field needs {self.lattice.node_count} values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Field values must be finite at every node")

    @classmethod
    def from_function(cls, lattice, func):
        """Samples ``func`` (vectorized over (N, n) points) at every node."""
        return cls(lattice, np.broadcast_to(np.asarray(func(lattice.nodes), dtype=float), (lattice.node_count,)))

    def copy(self):
        return LatticeField(self.lattice, self.values.copy())

    @property
    def interior_values(self):
        return self.values[self.lattice.interior]

    @property
    def strip_values(self):
        return self.values[self.lattice.strip]

    def value_at(self, x):
        """Value at the stored node nearest to x."""
        return float(self.values[self.lattice.nearest_node(x)])

    def to_frame(self):
        """DataFrame with columns x1..xn, class, value in node order."""
        return self.lattice.to_frame(self.values)

    @classmethod
    def from_frame(cls, lattice, frame):
        """
        Rebuilds a field on ``lattice`` from a table written by ``to_frame``.

        Raises:
            ValueError: if the node coordinates do not match the lattice.
        """
        columns = [f"x{i + 1}" for i in range(lattice.dimension)]
        coords = frame[columns].to_numpy(dtype=float)
        if coords.shape != lattice.nodes.shape or not np.allclose(coords, lattice.nodes, atol=1e-9 * max(1.0, lattice.spacing)):
            raise ValueError("Field table does not match the lattice nodes")
        return cls(lattice, frame['value'].to_numpy(dtype=float))
