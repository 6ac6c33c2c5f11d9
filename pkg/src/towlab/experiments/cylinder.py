import math

import pandas as pd

from ..analysis.oracles import gamblers_ruin_bottom
from ..analysis.utilities import format_number
from ..simulation.cylinder_walk import (CylinderConfig, bottom_escape_probability, exit_time_constant,
                                        exit_time_moment_check, fit_escape_constant)
from .experiment import EXIT_UNRELIABLE, Experiment


class CylinderExperiment(Experiment):
    """
    Sweep of the cylinder walk over start heights ell.

    The table has one row per height with columns param, value, estimate, std_error
    (estimate = P(bottom exit)), then capped_fraction, rounds_mean, exit_time_constant
    (eps^2 E[tau']) and closed_form (the gambler's ruin probability when beta = 0, nan
    otherwise). The JSON holds the fitted L of 1 - P <= L (ell + eps) / r and, when
    alpha > 0, the optional stopping check at the lowest height.
    """
    mtype = 'cylinder'

    def __init__(self, config):
        super().__init__(config)
        self.estimates = []

    def _update_notes(self):
        self.notes = (self.config.notes or
                      f"p{format_number(self.config.p)}_r{format_number(self.config.radius)}"
                      f"_eps{format_number(self.config.epsilon)}_seed{self.config.seed}")

    def _closed_form(self, walk):
        if walk.beta != 0:
            return math.nan
        try:
            return gamblers_ruin_bottom(walk.ell, walk.height, walk.epsilon)
        except ValueError:
            return math.nan

    def run(self):
        config = self.config
        rows = []
        for ell in config.ells:
            walk = CylinderConfig.from_exponent(config.radius, ell, config.epsilon, config.n, config.p)
            self._print(f"ell = {ell:g}: {config.trials} walks...")
            estimate = bottom_escape_probability(walk, config.trials, config.seed, config.round_cap,
                                                 threads=config.threads, progress=self.verbose)
            self.estimates.append(estimate)
            rows.append({'param': 'ell', 'value': ell, 'estimate': estimate.mean, 'std_error': estimate.std_error,
                         'capped_fraction': estimate.capped_fraction, 'rounds_mean': estimate.rounds_mean,
                         'exit_time_constant': exit_time_constant(estimate.rounds_mean, config.epsilon),
                         'closed_form': self._closed_form(walk)})
        self.data = pd.DataFrame(rows)

        complements = 1.0 - self.data['estimate'].to_numpy()
        self.results = {'fitted_L': fit_escape_constant(config.ells, config.radius, config.epsilon, complements),
                        'alpha': walk.alpha, 'beta': walk.beta}
        if walk.alpha > 0:
            lowest = walk.with_ell(min(config.ells))
            check = exit_time_moment_check(lowest, config.trials, config.seed, config.round_cap,
                                           threads=config.threads)
            self.results.update({f"exit_time_{k}": v for k, v in check.as_dict().items()})
        self._print(f"Fitted L = {self.results['fitted_L']:.6g}")

    def analyze(self):
        """Exit status 3 when a cell is invalid or too many walks hit the round cap."""
        for estimate in self.estimates:
            if not estimate.valid or estimate.capped_fraction > self.config.capped_threshold:
                self._print(f"Unreliable cell: {estimate.capped_fraction:.2%} of the walks were capped.")
                self.status = EXIT_UNRELIABLE
        return self.status
