import math

from ..analysis.mean_value import limit_of_residual, mv_limit
from ..analysis.utilities import format_number
from .experiment import Experiment


class MeanValueExperiment(Experiment):
    """
    Asymptotic mean value table of a library test function at a point.

    Saves one row phi, x1..xn, p, epsilon, residual, residual/eps^2 per epsilon of the list, and the
    extrapolated limit next to the finite difference prediction
    beta * (Δφ + (p-2) Δ_∞^N φ) / (2 (n+2)) (½ Δ_∞^N φ for p = inf). The prediction is
    nan where the normalized operator is undefined.
    """
    mtype = 'mvp'

    def __init__(self, config):
        super().__init__(config)
        self.limit = None

    def _update_notes(self):
        point = '_'.join(format_number(c) for c in self.config.point)
        self.notes = self.config.notes or f"{self.config.function}_p{format_number(self.config.p)}_x{point}"

    def run(self):
        config = self.config
        phi = config.test_function
        self._print(f"Mean value table for {phi.describe()} at {config.point}, p = {config.p:g}...")
        self.limit = mv_limit(phi, config.point, config.p, config.epsilons, n=config.n, m=config.m,
                              analytic_extrema=config.analytic_extrema)
        self.data = self.limit.table
        try:
            prediction = limit_of_residual(phi, config.point, config.p, config.n)
        except ValueError as e:
            self._print(f"No operator prediction: {e}")
            prediction = math.nan
        self.results = {**self.limit.as_dict(), 'prediction': prediction}
        self._print(f"Limit {self.limit.limit:.6g} (prediction {prediction:.6g})")
