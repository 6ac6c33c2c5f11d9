"""
Command line entry point.

    towlab solve --domain interval:0,1 --p 3 --eps 0.1 --k 4 --payoff step:0.5
    towlab value --p 3 --eps 0.1 --start 0.5 --trials 100000 --threads 4
    towlab harnack --n 2 --p 2,6 --eps 0.2,0.1,0.05 --trials 2000
    towlab mvp --function aronsson --point 1,0 --p inf --eps 0.1,0.05,0.025,0.0125

Every flag may also be given in a flat key=value file passed with --config; flags win
over the file, the file wins over the defaults. Exit codes: 0 success, 1 usage or
configuration error, 2 numerical non-convergence, 3 statistically unreliable result.
"""
import argparse
import sys

from ._version import __version__
from .errors import StrategyError
from .experiments.config import CONFIGS
from .experiments.cylinder import CylinderExperiment
from .experiments.elliptic import SolveExperiment
from .experiments.experiment import EXIT_CONFIG, EXIT_OK
from .experiments.game_value import GameValueExperiment
from .experiments.harnack import HarnackExperiment
from .experiments.mean_value import MeanValueExperiment
from .experiments.oracle import OracleExperiment
from .experiments.parabolic import ParabolicExperiment

EXPERIMENTS = {
    'solve': SolveExperiment,
    'solve-parabolic': ParabolicExperiment,
    'value': GameValueExperiment,
    'cylinder': CylinderExperiment,
    'harnack': HarnackExperiment,
    'mvp': MeanValueExperiment,
    'oracle': OracleExperiment,
}


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser without flag abbreviations whose usage errors exit with status 1."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault('allow_abbrev', False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add(parser, flag, dest, help):
    parser.add_argument(flag, dest=dest, default=None, metavar=dest.upper(), help=help)


def _common(parser):
    parser.add_argument('--config', dest='config_file', default=None, metavar='FILE',
                        help="flat key=value file with parameters (flags override it)")
    parser.add_argument('--dump-config', action='store_true',
                        help="print the resolved configuration and exit")
    parser.add_argument('--quiet', dest='verbose', action='store_const', const=False, default=None,
                        help="no progress output")
    _add(parser, '--seed', 'seed', "master seed of the random streams (default 0)")
    _add(parser, '--threads', 'threads', "worker processes (default 1); results do not depend on it")
    _add(parser, '--output-dir', 'output_dir', "output directory (default $TOWLAB_OUTPUT_DIR or ./towlab_results)")
    _add(parser, '--notes', 'notes', "tag used in the output filenames instead of the parameters")


def _game(parser):
    _add(parser, '--domain', 'domain', "interval:a,b | box:lo:hi,lo:hi,... | ball:c1,...,cn;radius")
    _add(parser, '--p', 'p', "exponent, p >= 2")
    _add(parser, '--eps', 'epsilon', "step size epsilon")
    _add(parser, '--k', 'refinement', "lattice spacings per epsilon (default 4)")
    _add(parser, '--closure', 'closure', "open (default) or closed DPP ball")
    _add(parser, '--payoff', 'payoff', "linear[:c1,..;offset] | const:c | step:threshold[,axis] | radial:c;gamma | caloric")


def build_parser():
    parser = ArgumentParser(prog='towlab', description="Tug-of-war with noise: DPP solvers, game "
                            "simulation and mean value diagnostics.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest='command', required=True, metavar='COMMAND', parser_class=ArgumentParser)

    solve = commands.add_parser('solve', help="solve the elliptic DPP")
    _common(solve)
    _game(solve)
    _add(solve, '--tol', 'tol', "sup-norm change between sweeps at which to stop (default 1e-10)")
    _add(solve, '--max-sweeps', 'max_sweeps', "sweep limit (default 50 (diam/eps)^2)")
    _add(solve, '--method', 'method', "jacobi (default) or gauss-seidel")
    _add(solve, '--sweep-eps', 'sweep_eps', "comma separated epsilons for the sup-error table")
    _add(solve, '--reference', 'reference', "payoff style function the sweep errors are measured against (default linear)")

    parabolic = commands.add_parser('solve-parabolic', help="march the parabolic DPP")
    _common(parabolic)
    _game(parabolic)
    _add(parabolic, '--horizon', 'horizon', "final time T")
    _add(parabolic, '--tol', 'tol', "admissible parabolic defect (default 1e-10)")

    value = commands.add_parser('value', help="Monte Carlo game value")
    _common(value)
    _game(value)
    _add(value, '--start', 'start', "starting point x1,...,xn")
    _add(value, '--trials', 'trials', "number of plays")
    _add(value, '--player-one', 'player_one', "greedy[:solve|:FIELD.csv] | pull:x1,...,xn | push:x1,...,xn")
    _add(value, '--player-two', 'player_two', "greedy[:solve|:FIELD.csv] | pull:x1,...,xn | push:x1,...,xn")
    _add(value, '--noise', 'noise', "ball (default) or grid")
    _add(value, '--round-cap', 'round_cap', "rounds after which a play is stopped")
    _add(value, '--horizon', 'horizon', "play the time tracking game from this time")
    _add(value, '--tol', 'tol', "tolerance of the DPP solve behind greedy strategies")
    _add(value, '--capped-threshold', 'capped_threshold', "largest acceptable share of capped plays")
    _add(value, '--trajectories', 'trajectories', "number of plays to save in full")

    cylinder = commands.add_parser('cylinder', help="cylinder walk sweep over start heights")
    _common(cylinder)
    _add(cylinder, '--r', 'radius', "radius scale r")
    _add(cylinder, '--ells', 'ells', "comma separated start heights")
    _add(cylinder, '--eps', 'epsilon', "step size epsilon")
    _add(cylinder, '--n', 'n', "base dimension")
    _add(cylinder, '--p', 'p', "exponent, p >= 2 or inf")
    _add(cylinder, '--trials', 'trials', "walks per height")
    _add(cylinder, '--round-cap', 'round_cap', "rounds after which a walk is stopped")
    _add(cylinder, '--capped-threshold', 'capped_threshold', "largest acceptable share of capped walks")

    harnack = commands.add_parser('harnack', help="reach probabilities of the pull/push game in a ball")
    _common(harnack)
    _add(harnack, '--n', 'n', "dimension (default 2)")
    _add(harnack, '--p', 'ps', "comma separated exponents, p >= 2 or inf")
    _add(harnack, '--eps', 'epsilons', "comma separated epsilons")
    _add(harnack, '--start', 'start', "starting point x1,...,xn (default -radius/4 e1)")
    _add(harnack, '--target', 'target', "point to reach x1,...,xn (default radius/4 e1)")
    _add(harnack, '--radius', 'radius', "radius of the ball around 0 the game is played in")
    _add(harnack, '--trials', 'trials', "plays per (p, eps) cell")
    _add(harnack, '--noise', 'noise', "ball (default) or grid")
    _add(harnack, '--round-cap', 'round_cap', "rounds after which a play is stopped")
    _add(harnack, '--capped-threshold', 'capped_threshold', "largest acceptable share of capped plays")

    mvp = commands.add_parser('mvp', help="asymptotic mean value table")
    _common(mvp)
    _add(mvp, '--function', 'function', "test function from the library")
    _add(mvp, '--point', 'point', "point x1,...,xn")
    _add(mvp, '--p', 'p', "exponent, p > 1 or inf")
    _add(mvp, '--n', 'n', "dimension (default len(point))")
    _add(mvp, '--eps', 'epsilons', "comma separated, decreasing geometric epsilons")
    _add(mvp, '--m', 'm', "quadrature level")
    mvp.add_argument('--analytic-extrema', dest='analytic_extrema', action='store_const', const=True,
                     default=None, help="use closed form ball extrema (aronsson)")

    oracle = commands.add_parser('oracle', help="dump the exact discrete fixtures")
    _common(oracle)
    return parser


def main(argv=None):
    args = vars(build_parser().parse_args(argv))
    command = args.pop('command')
    config_file = args.pop('config_file')
    dump = args.pop('dump_config')
    try:
        config = CONFIGS[command](config_file=config_file, **args)
        if dump:
            print(config.dump())
            return EXIT_OK
        return EXPERIMENTS[command](config).run_experiment()
    except (ValueError, StrategyError, OSError) as e:
        print(f"towlab {command}: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
