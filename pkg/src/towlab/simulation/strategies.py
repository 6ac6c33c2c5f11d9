"""
Strategies for the two players.

A strategy maps the history of the game and the current token position to the next
position, which must lie in the open epsilon ball around the current one. Strategies
are module level classes so they can be shipped to worker processes.
"""
from __future__ import annotations

import numpy as np

from ..errors import StrategyError

MODES = ['maximize', 'minimize']


class Strategy:
    """Base class. Subclasses implement ``next_move``."""
    name = None

    def next_move(self, history, position, epsilon):
        """
        Args:
            history (Trajectory): The game so far (positions and toss outcomes).
            position (ndarray): Current token position.
            epsilon (float): Step size.

        Returns:
            ndarray: Next position, |next - position| < epsilon.
        """
        raise NotImplementedError

    def describe(self):
        return self.name

    def __repr__(self):
        return f"{self.__class__.__name__}({self.describe()})"


def checked_move(strategy, history, position, epsilon):
    """Calls the strategy and enforces the open ball contract."""
    move = np.asarray(strategy.next_move(history, position, epsilon), dtype=float)
    if move.shape != position.shape:
        raise StrategyError(f"{strategy!r} returned a point of shape {move.shape}, expected {position.shape}")
    step = float(np.linalg.norm(move - position))
    if not step < epsilon:
        raise StrategyError(f"{strategy!r} moved {step:.6g} >= epsilon = {epsilon:g} from {position}")
    return move


class GreedyStrategy(Strategy):
    """
    Moves to the lattice node with the largest (maximize) or smallest (minimize) field
    value among the nodes in the open epsilon ball of the current position, center excluded.
    Ties go to the first node in node order.
    """
    name = 'greedy'

    def __init__(self, field, mode='maximize'):
        if mode not in MODES:
            raise ValueError(f"Invalid mode '{mode}'. Must be one of {MODES}")
        self.field = field
        self.mode = mode

    def candidates(self, position, epsilon):
        lattice = self.field.lattice
        found = lattice.nodes_within(position, epsilon, closure='open')
        if found.size:
            offset = np.linalg.norm(lattice.nodes[found] - position, axis=1)
            found = found[offset > 1e-12 * max(1.0, epsilon)]
        return found

    def next_move(self, history, position, epsilon):
        found = self.candidates(position, epsilon)
        if found.size == 0:
            raise StrategyError(f"No lattice node within epsilon = {epsilon:g} of {position}; "
                                "the position is outside the field's lattice coverage")
        values = self.field.values[found]
        pick = np.argmax(values) if self.mode == 'maximize' else np.argmin(values)
        return self.field.lattice.nodes[found[pick]].copy()

    def describe(self):
        return f"greedy:{self.mode}"


class PullToward(Strategy):
    """Steps (1 - delta) * epsilon toward a target, or onto it when it is closer than that."""
    name = 'pull'

    def __init__(self, target, delta=1e-6):
        self.target = np.atleast_1d(np.asarray(target, dtype=float))
        if not 0 < delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {delta}")
        self.delta = float(delta)

    def next_move(self, history, position, epsilon):
        if self.target.shape != position.shape:
            raise ValueError(f"Dimension mismatch: target {self.target.shape}, position {position.shape}")
        gap = self.target - position
        dist = float(np.linalg.norm(gap))
        reach = (1.0 - self.delta) * epsilon
        if dist <= reach:
            return self.target.copy()
        return position + gap * (reach / dist)

    def describe(self):
        return "pull:" + ",".join(f"{c:g}" for c in self.target)


class PushAway(PullToward):
    """
    Steps (1 - delta) * epsilon straight away from a target, along the first axis when
    the token sits on it. The opponent of a player pulling toward the same target.
    """
    name = 'push'

    def next_move(self, history, position, epsilon):
        if self.target.shape != position.shape:
            raise ValueError(f"Dimension mismatch: target {self.target.shape}, position {position.shape}")
        gap = position - self.target
        dist = float(np.linalg.norm(gap))
        if dist == 0:
            gap, dist = np.eye(1, len(position))[0], 1.0
        return position + gap * ((1.0 - self.delta) * epsilon / dist)

    def describe(self):
        return "push:" + ",".join(f"{c:g}" for c in self.target)


def parse_strategy(text, mode, field=None):
    """
    Builds a strategy from its command line selector.

    Args:
        text (str): ``greedy[:FIELD]``, ``pull:x1,...,xn`` or ``push:x1,...,xn``. The field
            itself is resolved by the caller and passed as ``field``.
        mode (str): 'maximize' for Player I, 'minimize' for Player II (greedy only).
        field (LatticeField): Field for greedy strategies.
    """
    kind, _, spec = text.strip().partition(':')
    kind = kind.lower()
    if kind == 'greedy':
        if field is None:
            raise ValueError("Greedy strategies need a solved field")
        return GreedyStrategy(field, mode)
    if kind in ('pull', 'push'):
        try:
            target = [float(v) for v in spec.split(',')]
        except ValueError as e:
            raise ValueError(f"Could not parse strategy '{text}': {e}")
        return PullToward(target) if kind == 'pull' else PushAway(target)
    raise ValueError(f"Unknown strategy '{kind}'. Must be one of ['greedy', 'pull', 'push']")
