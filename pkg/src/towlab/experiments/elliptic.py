import numpy as np
import pandas as pd

from ..analysis.utilities import format_number
from ..dpp.elliptic import solve
from ..geometry.lattice import build_lattice
from .experiment import EXIT_NOT_CONVERGED, Experiment


def solve_report_results(report):
    """SolveReport fields that are reproducible between runs, for tables (wall time dropped)."""
    results = report.as_dict()
    results.pop('wall_time_s')
    return results


class SolveExperiment(Experiment):
    """
    Solves the elliptic DPP on a lattice and saves the field.

    With ``sweep_eps`` set it also solves for every epsilon of the list and saves a table
    of sup-node deviations from the ``reference`` function, the desk scale version of the
    convergence of p-harmonious functions as epsilon -> 0.

    Attributes:
        :field (LatticeField): Solved field at ``config.epsilon``
        :report (SolveReport): Its solve report
        :sweep (pd.DataFrame): epsilon, nodes, sweeps, converged, final_defect, sup_error
    """
    mtype = 'solve'

    def __init__(self, config):
        super().__init__(config)
        self.field = None
        self.report = None
        self.sweep = None

    def _update_notes(self):
        self.notes = (self.config.notes or
                      f"p{format_number(self.config.p)}_eps{format_number(self.config.epsilon)}"
                      f"_k{self.config.refinement}")

    def _solve(self, epsilon):
        config = self.config
        lattice = build_lattice(config.domain_object, epsilon, config.refinement, config.closure)
        self._print(f"Solving on {lattice!r}...")
        return solve(lattice, config.payoff_object, config.params.with_epsilon(epsilon),
                     tol=config.tol, max_sweeps=config.max_sweeps, method=config.method)

    def _sup_error(self, field):
        lattice = field.lattice
        reference = np.asarray(self.config.reference_object(lattice.nodes[lattice.interior]), dtype=float)
        return float(np.max(np.abs(field.interior_values - reference)))

    def run(self):
        self.field, self.report = self._solve(self.config.epsilon)
        self.data = self.field.to_frame()
        self.results = {**self.field.lattice.describe(), **self.report.as_dict()}
        self._print(f"{self.report.sweeps} sweeps, defect {self.report.final_defect:.3e}")

        if self.config.sweep_eps:
            rows = []
            for epsilon in self.config.sweep_eps:
                field, report = self._solve(epsilon)
                rows.append({'epsilon': epsilon, 'nodes': field.lattice.node_count, 'sweeps': report.sweeps,
                             'converged': report.converged, 'final_defect': report.final_defect,
                             'sup_error': self._sup_error(field)})
                self._print(f"eps = {epsilon:g}: sup error {rows[-1]['sup_error']:.6g}")
            self.sweep = pd.DataFrame(rows)
            self.extra_tables['sweep'] = self.sweep
            errors = self.sweep['sup_error'].to_numpy()
            self.results['sweep_monotone'] = bool(np.all(np.diff(errors) < 0))

    def analyze(self):
        """Exit status 2 if the main solve or any sweep solve failed to converge."""
        converged = self.report.converged
        if self.sweep is not None:
            converged = converged and bool(self.sweep['converged'].all())
        if not converged:
            self._print("DPP iteration did not converge.")
            self.status = EXIT_NOT_CONVERGED
        return self.status
