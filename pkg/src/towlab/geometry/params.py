"""
Game parameters shared by the DPP solvers, the game simulator and the mean value lab.

The tug-of-war with noise is driven by a biased coin: with probability alpha a fair
coin decides which player moves the token, with probability beta the token takes a
uniform random step in the epsilon ball. The probabilities are tied to the exponent
p and the dimension n so that the one step expansion reproduces the normalized
p-Laplacian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field


def probabilities(p, n):
    """
    Coin probabilities (alpha, beta) for exponent p in dimension n.

    Args:
        p (float): Exponent, p > 1 or ``math.inf``.
        n (int): Space dimension, n >= 1.

    Returns:
        tuple: (alpha, beta) with alpha = (p-2)/(p+n) and beta = 1 - alpha,
        or (1, 0) for p = inf.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"Dimension n must be a positive integer, got {n}")
    if math.isnan(p) or p <= 1:
        raise ValueError(f"Exponent p must satisfy p > 1 (or p = inf), got {p}")
    if math.isinf(p):
        return 1.0, 0.0
    alpha = (p - 2.0) / (p + n)
    # beta as 1 - alpha keeps alpha + beta == 1 exactly
    return alpha, 1.0 - alpha


@dataclass(frozen=True)
class GameParams:
    """
    Dimension, exponent and step size of a tug-of-war with noise.

    Attributes:
        n (int): Space dimension.
        p (float): Exponent. Games and DPPs need 2 <= p < inf, the mean value lab
            accepts 1 < p <= inf (build those with ``for_mean_value=True``).
        epsilon (float): Step size, the radius of the ball the token moves in.
        alpha (float): Probability of a tug-of-war round (derived).
        beta (float): Probability of a noise round (derived).
    """
    n: int
    p: float
    epsilon: float
    for_mean_value: bool = False
    alpha: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"Step size epsilon must be positive, got {self.epsilon}")
        alpha, beta = probabilities(self.p, self.n)
        if not self.for_mean_value:
            if math.isinf(self.p):
                raise ValueError("p = inf is only available for the mean value lab; "
                                 "the game needs beta > 0 to terminate")
            if self.p < 2:
                raise ValueError(f"Games and DPPs need p >= 2, got {self.p}")
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'beta', beta)

    @property
    def toss_probabilities(self):
        """Categorical law over (player I, player II, noise)."""
        return (self.alpha / 2.0, self.alpha / 2.0, self.beta)

    def with_epsilon(self, epsilon):
        return GameParams(self.n, self.p, epsilon, for_mean_value=self.for_mean_value)

    def as_dict(self):
        return {'n': self.n, 'p': self.p, 'epsilon': self.epsilon,
                'alpha': self.alpha, 'beta': self.beta}
