import numpy as np

from ..analysis.utilities import format_number
from ..dpp.parabolic import parabolic_defect, solve_parabolic
from ..geometry.lattice import build_lattice
from .experiment import EXIT_NOT_CONVERGED, Experiment


class ParabolicExperiment(Experiment):
    """
    Marches the parabolic DPP to ``horizon`` and saves the space-time field.

    The payoff gives both the initial datum F(x, 0) and the lateral data F(x, t) on the
    strip. The result JSON carries the parabolic defect (zero up to rounding for the
    exact march) and the sup change between the last two slices.
    """
    mtype = 'solve-parabolic'

    def __init__(self, config):
        super().__init__(config)
        self.field = None

    def _update_notes(self):
        self.notes = (self.config.notes or
                      f"p{format_number(self.config.p)}_eps{format_number(self.config.epsilon)}"
                      f"_T{format_number(self.config.horizon)}")

    def run(self):
        config = self.config
        lattice = build_lattice(config.domain_object, config.epsilon, config.refinement, config.closure)
        self._print(f"Marching {lattice!r} to T = {config.horizon:g}...")
        self.field = solve_parabolic(lattice, config.payoff_object, config.horizon, config.params)
        self.data = self.field.to_frame()
        last_change = 0.0
        if self.field.slice_count > 1:
            last_change = float(np.max(np.abs(self.field.values[-1] - self.field.values[-2])))
        self.results = {**lattice.describe(), 'horizon': self.field.horizon, 'slices': self.field.slice_count,
                        'parabolic_defect': parabolic_defect(self.field, config.params),
                        'last_slice_change': last_change}
        self._print(f"{self.field.slice_count} slices, defect {self.results['parabolic_defect']:.3e}")

    def analyze(self):
        """Exit status 2 if the slices fail the parabolic DPP beyond ``tol``."""
        if not self.results['parabolic_defect'] <= self.config.tol:
            self.status = EXIT_NOT_CONVERGED
        return self.status
