import math

import pandas as pd

from ..analysis.utilities import format_number
from ..geometry.params import GameParams
from ..simulation.game import reach_probability
from .experiment import EXIT_UNRELIABLE, Experiment


class HarnackExperiment(Experiment):
    """
    Reach probabilities of the pull/push game in a ball, over exponents and epsilons.

    Player I pulls toward ``target``, Player II pushes away from it, and a play counts when
    the token comes within epsilon of the target before leaving B_radius(0). The table has
    one row per (p, epsilon) with columns p, epsilon, p_gt_n, estimate, std_error,
    capped_fraction and rounds_mean. The JSON holds, per exponent, the smallest estimate
    over the epsilons and the Harnack constant 1 / min P it gives (inf when some estimate
    is 0). For p > n the estimates should stay away from 0 as epsilon shrinks.
    """
    mtype = 'harnack'

    def __init__(self, config):
        super().__init__(config)
        self.estimates = []

    def _update_notes(self):
        self.notes = (self.config.notes or
                      f"n{self.config.n}_r{format_number(self.config.radius)}_seed{self.config.seed}")

    def run(self):
        config = self.config
        rows = []
        for p in config.ps:
            for epsilon in config.epsilons:
                params = GameParams(config.n, p, epsilon)
                self._print(f"p = {p:g}, eps = {epsilon:g}: {config.trials} plays...")
                estimate = reach_probability(config.start, config.target, params, config.trials, config.seed,
                                             radius=config.radius, round_cap=config.round_cap, noise=config.noise,
                                             threads=config.threads, progress=self.verbose)
                self.estimates.append(estimate)
                rows.append({'p': p, 'epsilon': epsilon, 'p_gt_n': p > config.n, 'estimate': estimate.mean,
                             'std_error': estimate.std_error, 'capped_fraction': estimate.capped_fraction,
                             'rounds_mean': estimate.rounds_mean})
        self.data = pd.DataFrame(rows)

        self.results = {}
        for p, group in self.data.groupby('p', sort=False):
            lowest = float(group['estimate'].min())
            tag = format_number(p)
            self.results[f"min_reach_p{tag}"] = lowest
            self.results[f"harnack_constant_p{tag}"] = 1.0 / lowest if lowest > 0 else math.inf
            self._print(f"p = {p:g}: min P = {lowest:.4g}")

    def analyze(self):
        """Exit status 3 when a cell is invalid or too many plays hit the round cap."""
        for estimate in self.estimates:
            if not estimate.valid or estimate.capped_fraction > self.config.capped_threshold:
                self._print(f"Unreliable cell: {estimate.capped_fraction:.2%} of the plays were capped.")
                self.status = EXIT_UNRELIABLE
        return self.status
