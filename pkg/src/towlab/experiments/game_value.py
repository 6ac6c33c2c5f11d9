import os

import pandas as pd

from ..analysis.utilities import csv_to_table, format_number
from ..dpp.elliptic import solve
from ..geometry.lattice import LatticeField, build_lattice
from ..simulation.game import estimate_value, play, play_timed
from ..simulation.sampling import trial_rng
from ..simulation.strategies import parse_strategy
from .elliptic import solve_report_results
from .experiment import EXIT_UNRELIABLE, Experiment


class GameValueExperiment(Experiment):
    """
    Monte Carlo value of the tug-of-war with noise at a starting point.

    Strategy selectors:
        ``greedy`` / ``greedy:solve``  greedy against the DPP solution, solved here
        ``greedy:PATH``                greedy against a field CSV written by ``solve``
        ``pull:x1,...,xn``             step toward a fixed target

    When a field is solved here its value at the start is reported as ``dpp_value`` so
    the estimate can be compared with it. Set ``trajectories`` to also save the first
    few plays (trial i is replayed with the same generator as in the estimate).
    """
    mtype = 'value'

    def __init__(self, config):
        super().__init__(config)
        self.lattice = None
        self.fields = {}
        self.estimate = None
        self.solved = None

    def _update_notes(self):
        start = '_'.join(format_number(c) for c in self.config.start)
        self.notes = (self.config.notes or
                      f"p{format_number(self.config.p)}_eps{format_number(self.config.epsilon)}"
                      f"_x{start}_seed{self.config.seed}")

    def _field(self, selector):
        """Field behind a greedy selector, loaded or solved once per source."""
        source = selector.partition(':')[2].strip() or 'solve'
        if source not in self.fields:
            config = self.config
            if self.lattice is None:
                self.lattice = build_lattice(config.domain_object, config.epsilon, config.refinement, config.closure)
            if source == 'solve':
                self._print(f"Solving the DPP on {self.lattice!r} for the greedy strategies...")
                field, report = solve(self.lattice, config.payoff_object, config.params, tol=config.tol)
                self.solved = (field, report)
            else:
                if not os.path.exists(source):
                    raise ValueError(f"Field file '{source}' does not exist")
                field = LatticeField.from_frame(self.lattice, csv_to_table(source))
            self.fields[source] = field
        return self.fields[source]

    def _strategy(self, selector, mode):
        field = self._field(selector) if selector.strip().lower().startswith('greedy') else None
        return parse_strategy(selector, mode, field)

    def _trajectory_table(self, sI, sII):
        config = self.config
        frames = []
        for trial in range(config.trajectories):
            rng = trial_rng(config.seed, trial)
            if config.horizon is None:
                played = play(config.start, sI, sII, config.params, config.payoff_object, config.domain_object,
                              rng, config.round_cap, config.noise)
            else:
                played = play_timed(config.start, config.horizon, sI, sII, config.params, config.payoff_object,
                                    config.domain_object, rng, config.noise)
            frame = played.to_frame()
            frame.insert(0, 'trial', trial)
            frame['end_state'] = played.end_state
            frame['payoff'] = played.payoff
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)

    def run(self):
        config = self.config
        sI = self._strategy(config.player_one, 'maximize')
        sII = self._strategy(config.player_two, 'minimize')
        self._print(f"Playing {config.trials} games of {sI.describe()} vs {sII.describe()}...")
        self.estimate = estimate_value(config.start, sI, sII, config.params, config.payoff_object,
                                       config.domain_object, config.trials, config.seed,
                                       round_cap=config.round_cap, noise=config.noise, horizon=config.horizon,
                                       threads=config.threads, progress=self.verbose)
        self.results = dict(self.estimate.as_dict())
        if self.solved is not None:
            field, report = self.solved
            self.results['dpp_value'] = field.value_at(config.start)
            self.results.update({f"dpp_{k}": v for k, v in solve_report_results(report).items()})
        self.data = pd.DataFrame([self.results])
        if config.trajectories:
            self.extra_tables['trajectories'] = self._trajectory_table(sI, sII)
        self._print(f"Value {self.estimate.mean:.6g} +- {self.estimate.std_error:.2g}")

    def analyze(self):
        """Exit status 3 when the estimate is invalid or too many plays hit the round cap."""
        estimate = self.estimate
        if not estimate.valid or estimate.capped_fraction > self.config.capped_threshold:
            self._print(f"Unreliable estimate: {estimate.capped_fraction:.2%} of the plays were capped.")
            self.status = EXIT_UNRELIABLE
        return self.status
