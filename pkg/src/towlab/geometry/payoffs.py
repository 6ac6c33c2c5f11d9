"""
Payoff and datum functions.

Every payoff is a small module-level class so it pickles into worker processes. A
payoff is called on a stack of points (N, n) (or a single point) and an optional time,
and returns one value per point.
"""
from __future__ import annotations

import numpy as np


class Payoff:
    """Base class. Subclasses implement ``_evaluate(points, t)`` on (N, n) arrays."""
    name = None

    def __call__(self, x, t=None):
        pts = np.asarray(x, dtype=float)
        single = pts.ndim <= 1
        pts = np.atleast_2d(pts) if pts.ndim else pts.reshape(1, 1)
        values = np.asarray(self._evaluate(pts, t), dtype=float)
        values = np.broadcast_to(values, (len(pts),))
        return float(values[0]) if single else values.copy()

    def _evaluate(self, pts, t):
        raise NotImplementedError

    @property
    def time_dependent(self):
        return False

    def describe(self):
        return self.name

    def __repr__(self):
        return f"{self.__class__.__name__}({self.describe()})"


class Constant(Payoff):
    name = 'const'

    def __init__(self, value):
        self.value = float(value)

    def _evaluate(self, pts, t):
        return np.full(len(pts), self.value)

    def describe(self):
        return f"const:{self.value:g}"


class Linear(Payoff):
    """Affine payoff offset + <coefficients, x>; the default is the first coordinate."""
    name = 'linear'

    def __init__(self, coefficients=None, offset=0.0):
        self.coefficients = None if coefficients is None else np.asarray(coefficients, dtype=float)
        self.offset = float(offset)

    def _evaluate(self, pts, t):
        if self.coefficients is None:
            return self.offset + pts[:, 0]
        if len(self.coefficients) != pts.shape[1]:
            raise ValueError(f"Dimension mismatch: {len(self.coefficients)} coefficients for points in R^{pts.shape[1]}")
        return self.offset + pts @ self.coefficients

    def describe(self):
        if self.coefficients is None and self.offset == 0:
            return 'linear'
        coefs = '1' if self.coefficients is None else ','.join(f"{c:g}" for c in self.coefficients)
        return f"linear:{coefs};{self.offset:g}"


class Step(Payoff):
    """Two valued payoff: ``high`` where x[axis] >= threshold, ``low`` elsewhere."""
    name = 'step'

    def __init__(self, threshold=0.5, axis=0, low=0.0, high=1.0):
        self.threshold = float(threshold)
        self.axis = int(axis)
        self.low = float(low)
        self.high = float(high)

    def _evaluate(self, pts, t):
        if not 0 <= self.axis < pts.shape[1]:
            raise ValueError(f"Step axis {self.axis} out of range for points in R^{pts.shape[1]}")
        return np.where(pts[:, self.axis] >= self.threshold, self.high, self.low)

    def describe(self):
        return f"step:{self.threshold:g},{self.axis}"


class Radial(Payoff):
    """|x - center|^exponent. With exponent (p-n)/(p-1) this is normalized p-harmonic away from center."""
    name = 'radial'

    def __init__(self, center, exponent):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.exponent = float(exponent)

    def _evaluate(self, pts, t):
        r = np.linalg.norm(pts - self.center, axis=1)
        if self.exponent == 0:
            return np.ones_like(r)
        if self.exponent < 0 and np.any(r == 0):
            raise ValueError("Radial payoff with negative exponent evaluated at its center")
        return r ** self.exponent

    def describe(self):
        return "radial:" + ",".join(f"{c:g}" for c in self.center) + f";{self.exponent:g}"


class Caloric(Payoff):
    """x1^2 + 2t/(n+2). Satisfies the p = 2 parabolic ball-average recursion exactly."""
    name = 'caloric'

    def _evaluate(self, pts, t):
        time = 0.0 if t is None else t
        return pts[:, 0] ** 2 + 2.0 * np.asarray(time, dtype=float) / (pts.shape[1] + 2)

    @property
    def time_dependent(self):
        return True


def _floats(text):
    return [float(v) for v in text.split(',') if v.strip()]


def parse_payoff(text):
    """
    Builds a payoff from its command line description.

    Accepted forms:
        ``linear`` | ``linear:c1,...,cn[;offset]``
        ``const:c``
        ``step:threshold[,axis]``
        ``radial:c1,...,cn;exponent``
        ``caloric``
    """
    kind, _, spec = text.strip().partition(':')
    kind = kind.lower()
    try:
        if kind == 'linear':
            if not spec:
                return Linear()
            coefs, _, offset = spec.partition(';')
            return Linear(_floats(coefs), float(offset) if offset else 0.0)
        if kind == 'const':
            return Constant(float(spec))
        if kind == 'step':
            values = _floats(spec) if spec else [0.5]
            return Step(values[0], int(values[1]) if len(values) > 1 else 0)
        if kind == 'radial':
            center, exponent = spec.split(';')
            return Radial(_floats(center), float(exponent))
        if kind == 'caloric':
            return Caloric()
    except (TypeError, ValueError) as e:
        raise ValueError(f"Could not parse payoff '{text}': {e}")
    raise ValueError(f"Unknown payoff '{kind}'. Must be one of ['linear', 'const', 'step', 'radial', 'caloric']")
