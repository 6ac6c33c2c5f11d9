"""
A domain is defined as a bounded open region with the queries the games and solvers need:
an inside test, the distance to the closed region and the distance to the boundary.

Shapes are small classes that share the Domain interface, in the same way every
concrete shape must answer the same questions no matter how it is described.
"""
from __future__ import annotations

import numpy as np


def _as_points(x, dimension):
    """Returns (points, single) with points shaped (N, dimension)."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim <= 1
    pts = np.atleast_1d(pts)
    if single:
        pts = pts.reshape(1, -1)
    if pts.shape[-1] != dimension:
        raise ValueError(f"Dimension mismatch: point has {pts.shape[-1]} coordinates, domain has {dimension}")
    return pts, single


class Domain:
    """
    Base class for all domains. All a domain is required to have is a dimension,
    a bounding box and an inside test; distances are shape specific.
    """
    shape = None
    dimension = None

    def inside(self, x):
        """
        True iff x lies strictly inside the shape.

        Args:
            x (array_like): A point of shape (n,) or a stack of points (N, n).
        """
        pts, single = _as_points(x, self.dimension)
        result = self._inside(pts)
        return bool(result[0]) if single else result

    def distance(self, x):
        """Euclidean distance from x to the closed domain (0 for points of the closure)."""
        pts, single = _as_points(x, self.dimension)
        result = self._distance(pts)
        return float(result[0]) if single else result

    def distance_to_boundary(self, x):
        """Euclidean distance from x to the boundary of the domain."""
        pts, single = _as_points(x, self.dimension)
        result = self._distance_to_boundary(pts)
        return float(result[0]) if single else result

    def bounds(self):
        """Bounding box as (lo, hi) arrays."""
        raise NotImplementedError

    @property
    def diameter(self):
        lo, hi = self.bounds()
        return float(np.linalg.norm(hi - lo))

    def contains_ball(self, center, radius):
        """True if the open ball B_radius(center) lies inside the domain."""
        return self.inside(center) and self.distance_to_boundary(center) >= radius

    def _inside(self, pts):
        raise NotImplementedError

    def _distance(self, pts):
        raise NotImplementedError

    def _distance_to_boundary(self, pts):
        raise NotImplementedError

    def describe(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{self.__class__.__name__}({self.describe()})"


class Box(Domain):
    """Axis aligned box lo < x < hi."""
    shape = 'box'

    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValueError("lo and hi must be 1D arrays of the same length")
        if not np.all(np.isfinite(self.lo)) or not np.all(np.isfinite(self.hi)):
            raise ValueError("Domain must be bounded (finite lo and hi)")
        if not np.all(self.hi > self.lo):
            raise ValueError(f"Empty interior: need lo < hi on every axis, got lo={self.lo}, hi={self.hi}")
        self.dimension = len(self.lo)

    def bounds(self):
        return self.lo.copy(), self.hi.copy()

    def _inside(self, pts):
        return np.all((pts > self.lo) & (pts < self.hi), axis=1)

    def _distance(self, pts):
        outside_by = np.maximum(self.lo - pts, 0.0) + np.maximum(pts - self.hi, 0.0)
        return np.linalg.norm(outside_by, axis=1)

    def _distance_to_boundary(self, pts):
        inner = np.min(np.minimum(pts - self.lo, self.hi - pts), axis=1)
        return np.where(self._inside(pts), inner, self._distance(pts))

    def describe(self):
        return ",".join(f"{a:g}:{b:g}" for a, b in zip(self.lo, self.hi))


class Interval(Box):
    """One dimensional box (a, b)."""
    shape = 'interval'

    def __init__(self, a, b):
        super().__init__([a], [b])
        self.a = float(a)
        self.b = float(b)

    def describe(self):
        return f"{self.a:g},{self.b:g}"


class Ball(Domain):
    """Open Euclidean ball |x - center| < radius."""
    shape = 'ball'

    def __init__(self, center, radius):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.radius = float(radius)
        if not self.radius > 0 or not np.isfinite(self.radius):
            raise ValueError(f"Ball radius must be positive and finite, got {radius}")
        self.dimension = len(self.center)

    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    def _inside(self, pts):
        return np.linalg.norm(pts - self.center, axis=1) < self.radius

    def _distance(self, pts):
        return np.maximum(np.linalg.norm(pts - self.center, axis=1) - self.radius, 0.0)

    def _distance_to_boundary(self, pts):
        return np.abs(self.radius - np.linalg.norm(pts - self.center, axis=1))

    def describe(self):
        return ",".join(f"{c:g}" for c in self.center) + f";{self.radius:g}"


def parse_domain(text):
    """
    Builds a domain from its command line description.

    Accepted forms:
        ``interval:a,b``
        ``box:lo1:hi1,lo2:hi2,...``
        ``ball:c1,c2,...;radius``
    """
    try:
        kind, spec = text.split(':', 1)
    except ValueError:
        raise ValueError(f"Invalid domain '{text}'. Must be one of interval:a,b | box:lo:hi,... | ball:c,...;r")
    kind = kind.strip().lower()
    try:
        if kind == 'interval':
            a, b = (float(v) for v in spec.split(','))
            return Interval(a, b)
        if kind == 'box':
            pairs = [axis.split(':') for axis in spec.split(',')]
            return Box([float(lo) for lo, _ in pairs], [float(hi) for _, hi in pairs])
        if kind == 'ball':
            center, radius = spec.split(';')
            return Ball([float(c) for c in center.split(',')], float(radius))
    except (TypeError, ValueError) as e:
        raise ValueError(f"Could not parse domain '{text}': {e}")
    raise ValueError(f"Unknown domain shape '{kind}'. Must be one of ['interval', 'box', 'ball']")
