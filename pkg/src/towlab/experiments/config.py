"""
Run configurations for the towlab commands.

A RunConfig subclass declares, for every parameter, a default (``_defaults``), a parser
for values read from text (``_kinds``) and the admissible values as a class attribute of
the same name:

    tuple  -> inclusive numeric range, None for an open end
    list   -> set of choices
    None   -> no automatic check (validated by hand in ``_validate`` if at all)

Values are resolved with the precedence  keyword/flag > config file > default.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError
from ..analysis.test_functions import LIBRARY, get_test_function
from ..dpp.elliptic import METHODS
from ..geometry.domain import parse_domain
from ..geometry.lattice import CLOSURES
from ..geometry.params import GameParams, probabilities
from ..geometry.payoffs import parse_payoff
from ..simulation.game import NOISE_MODES


### PARSERS FOR key=value TEXT ###

def float_value(text):
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    token = str(text).strip().lower()
    if token in ('inf', '+inf', 'infinity'):
        return math.inf
    return float(token)


def int_value(text):
    if isinstance(text, (int, np.integer)) and not isinstance(text, bool):
        return int(text)
    value = float(str(text).strip())
    if value != int(value):
        raise ValueError(f"{text} is not an integer")
    return int(value)


def optional(parser):
    def parse(text):
        if text is None or str(text).strip().lower() in ('', 'none'):
            return None
        return parser(text)
    parse.__name__ = f"optional_{parser.__name__}"
    return parse


def float_list(text):
    if isinstance(text, (list, tuple, np.ndarray)):
        return [float_value(v) for v in text]
    return [float_value(v) for v in str(text).split(',') if v.strip()]


def bool_value(text):
    if isinstance(text, (bool, np.bool_)):
        return bool(text)
    token = str(text).strip().lower()
    if token in ('1', 'true', 'yes', 'on'):
        return True
    if token in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"{text} is not a boolean")


def str_value(text):
    return str(text).strip()


def format_value(value):
    """Inverse of the parsers, used by ``dump``."""
    if value is None:
        return 'none'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return 'inf' if math.isinf(value) else repr(value)
    if isinstance(value, (list, tuple)):
        return ','.join(format_value(v) for v in value)
    return str(value)


### HELPERS FOR _check_params ###

def is_value_between(value, num_tuple):
    if len(num_tuple) != 2:
        raise ValueError("Tuple must contain exactly two numbers")
    lower_bound = num_tuple[0] if num_tuple[0] is not None else -math.inf
    upper_bound = num_tuple[1] if num_tuple[1] is not None else math.inf
    return lower_bound <= value <= upper_bound


def is_contained(value, choices):
    if value in choices:
        return True
    return str(value).lower() in [str(item).lower() for item in choices]


def get_class_constraints(instance):
    """Public non-callable class attributes along the MRO, i.e. the declared constraints."""
    constraints = {}
    for base in reversed(type(instance).__mro__):
        constraints.update({attr: value for attr, value in base.__dict__.items()
                            if not attr.startswith('_') and not callable(value)
                            and not isinstance(value, (property, staticmethod, classmethod))})
    return constraints


def read_config_file(path):
    """
    Flat ``key = value`` file; '#' starts a comment, dashes in keys become underscores.
    """
    values = {}
    with open(path) as f:
        for number, raw in enumerate(f, start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError(f"{path}:{number}: expected key=value, got '{raw.strip()}'")
            key, value = (part.strip() for part in line.split('=', 1))
            values[key.replace('-', '_')] = value
    return values


class RunConfig:
    """
    Base run configuration. Subclasses extend ``_defaults``/``_kinds`` and declare
    constraints as class attributes.

    Attributes:
        command (str): Subcommand name.
        seed, threads, output_dir, notes, verbose: shared by every command.
    """
    command = None

    seed = (0, None)
    threads = (1, None)
    output_dir = None
    notes = None
    verbose = None

    _defaults = {'seed': 0, 'threads': 1, 'output_dir': None, 'notes': '', 'verbose': True}
    _kinds = {'seed': int_value, 'threads': int_value, 'output_dir': optional(str_value),
              'notes': str_value, 'verbose': bool_value}
    _strictly_positive = ()

    def __init__(self, config_file=None, **params):
        settings = dict(self._defaults)
        if config_file is not None:
            settings.update(self._parse(read_config_file(config_file)))
        settings.update(self._parse({k: v for k, v in params.items() if v is not None}))
        for key, value in settings.items():
            setattr(self, key, value)
        self._check_params()
        self._validate()

    def _parse(self, raw):
        parsed = {}
        for key, value in raw.items():
            if key not in self._defaults:
                raise ConfigError(f"Unknown parameter '{key}' for {self.command}. "
                                  f"Must be one of {sorted(self._defaults)}")
            try:
                parsed[key] = self._kinds[key](value)
            except (TypeError, ValueError, OverflowError) as e:
                raise ConfigError(f"Could not read {key}={value!r}: {e}") from None
        return parsed

    def _check_params(self):
        """Validates every value against its class attribute constraint."""
        constraints = get_class_constraints(self)
        for key in self._defaults:
            constraint = constraints.get(key)
            value = getattr(self, key)
            if value is None:
                continue
            values = value if isinstance(value, list) else [value]
            if key in self._strictly_positive and not all(item > 0 for item in values):
                raise ConfigError(f"{key} must be > 0, got {value}")
            if constraint is None:
                continue
            for item in values:
                if isinstance(constraint, tuple) and not is_value_between(item, constraint):
                    raise ConfigError(f"Input value {item} for {key} is out of acceptable range {constraint}")
                if isinstance(constraint, list) and not is_contained(item, constraint):
                    raise ConfigError(f"Input value {item} for {key} is not one of {constraint}")

    def _validate(self):
        """Cross-parameter checks; override in child classes."""
        pass

    def _guard(self, func, *args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def as_dict(self):
        return {key: getattr(self, key) for key in self._defaults}

    def dump(self):
        """Resolved configuration as key=value lines, readable by ``read_config_file``."""
        return '\n'.join(f"{key} = {format_value(value)}" for key, value in sorted(self.as_dict().items()))

    def __repr__(self):
        body = ', '.join(f"{k}={v!r}" for k, v in self.as_dict().items())
        return f"{self.__class__.__name__}({body})"


class GameConfig(RunConfig):
    """Shared by every command that builds a lattice game in a domain."""
    domain = None
    p = (2, None)
    epsilon = None
    refinement = (1, None)
    closure = CLOSURES
    payoff = None

    _defaults = {**RunConfig._defaults, 'domain': 'interval:0,1', 'p': 2.0, 'epsilon': 0.1,
                 'refinement': 4, 'closure': 'open', 'payoff': 'linear'}
    _kinds = {**RunConfig._kinds, 'domain': str_value, 'p': float_value, 'epsilon': float_value,
              'refinement': int_value, 'closure': str_value, 'payoff': str_value}
    _strictly_positive = ('epsilon',)

    def _validate(self):
        self.domain_object = self._guard(parse_domain, self.domain)
        self.payoff_object = self._guard(parse_payoff, self.payoff)
        self.params = self._guard(GameParams, self.domain_object.dimension, self.p, self.epsilon)
        if self.refinement == 1 and self.closure != 'closed':
            raise ConfigError("refinement = 1 needs closure = closed")


class SolveConfig(GameConfig):
    command = 'solve'
    tol = (0, 1)
    max_sweeps = (1, None)
    method = METHODS
    sweep_eps = None
    reference = None

    _defaults = {**GameConfig._defaults, 'tol': 1e-10, 'max_sweeps': None, 'method': 'jacobi',
                 'sweep_eps': None, 'reference': 'linear'}
    _kinds = {**GameConfig._kinds, 'tol': float_value, 'max_sweeps': optional(int_value),
              'method': str_value, 'sweep_eps': optional(float_list), 'reference': str_value}
    _strictly_positive = ('epsilon', 'tol', 'sweep_eps')

    def _validate(self):
        super()._validate()
        self.reference_object = self._guard(parse_payoff, self.reference)


class ParabolicConfig(GameConfig):
    command = 'solve-parabolic'
    horizon = (0, None)
    tol = (0, 1)

    _defaults = {**GameConfig._defaults, 'horizon': 0.1, 'tol': 1e-10}
    _kinds = {**GameConfig._kinds, 'horizon': float_value, 'tol': float_value}
    _strictly_positive = ('epsilon', 'horizon', 'tol')


class ValueConfig(GameConfig):
    command = 'value'
    start = None
    trials = (1, None)
    player_one = None
    player_two = None
    noise = NOISE_MODES
    round_cap = (1, None)
    horizon = (0, None)
    tol = (0, 1)
    capped_threshold = (0, 1)
    trajectories = (0, None)

    _defaults = {**GameConfig._defaults, 'start': [0.5], 'trials': 10000, 'player_one': 'greedy:solve',
                 'player_two': 'greedy:solve', 'noise': 'ball', 'round_cap': None, 'horizon': None,
                 'tol': 1e-10, 'capped_threshold': 0.01, 'trajectories': 0}
    _kinds = {**GameConfig._kinds, 'start': float_list, 'trials': int_value, 'player_one': str_value,
              'player_two': str_value, 'noise': str_value, 'round_cap': optional(int_value),
              'horizon': optional(float_value), 'tol': float_value, 'capped_threshold': float_value,
              'trajectories': int_value}
    _strictly_positive = ('epsilon', 'horizon', 'tol')

    def _validate(self):
        super()._validate()
        if len(self.start) != self.domain_object.dimension:
            raise ConfigError(f"start has {len(self.start)} coordinates, the domain lives in "
                              f"R^{self.domain_object.dimension}")


class CylinderRunConfig(RunConfig):
    command = 'cylinder'
    radius = None
    ells = (0, None)
    epsilon = None
    n = (1, None)
    p = (2, None)
    trials = (1, None)
    round_cap = (1, None)
    capped_threshold = (0, 1)

    _defaults = {**RunConfig._defaults, 'radius': 1.0, 'ells': [0.05, 0.1, 0.2, 0.4], 'epsilon': 0.05,
                 'n': 1, 'p': 3.0, 'trials': 10000, 'round_cap': None, 'capped_threshold': 0.01}
    _kinds = {**RunConfig._kinds, 'radius': float_value, 'ells': float_list, 'epsilon': float_value,
              'n': int_value, 'p': float_value, 'trials': int_value, 'round_cap': optional(int_value),
              'capped_threshold': float_value}
    _strictly_positive = ('radius', 'epsilon', 'ells')

    def _validate(self):
        if not self.ells:
            raise ConfigError("ells needs at least one value")
        self._guard(probabilities, self.p, self.n)


class HarnackConfig(RunConfig):
    command = 'harnack'
    n = (1, None)
    ps = (2, None)
    epsilons = None
    start = None
    target = None
    radius = None
    trials = (1, None)
    noise = NOISE_MODES
    round_cap = (1, None)
    capped_threshold = (0, 1)

    _defaults = {**RunConfig._defaults, 'n': 2, 'ps': [2.0, 6.0], 'epsilons': [0.2, 0.1, 0.05], 'start': None,
                 'target': None, 'radius': 2.0, 'trials': 2000, 'noise': 'ball', 'round_cap': None,
                 'capped_threshold': 0.01}
    _kinds = {**RunConfig._kinds, 'n': int_value, 'ps': float_list, 'epsilons': float_list,
              'start': optional(float_list), 'target': optional(float_list), 'radius': float_value,
              'trials': int_value, 'noise': str_value, 'round_cap': optional(int_value),
              'capped_threshold': float_value}
    _strictly_positive = ('epsilons', 'radius')

    def _validate(self):
        if not self.ps or not self.epsilons:
            raise ConfigError("ps and epsilons need at least one value each")
        if self.start is None:
            self.start = [-self.radius / 4] + [0.0] * (self.n - 1)
        if self.target is None:
            self.target = [self.radius / 4] + [0.0] * (self.n - 1)
        for name in ('start', 'target'):
            point = getattr(self, name)
            if len(point) != self.n:
                raise ConfigError(f"{name} has {len(point)} coordinates, n = {self.n}")
            if not np.linalg.norm(point) < self.radius:
                raise ConfigError(f"{name} {point} is not inside the ball of radius {self.radius:g}")
        for p in self.ps:
            for epsilon in self.epsilons:
                self._guard(GameParams, self.n, p, epsilon)


class MeanValueConfig(RunConfig):
    command = 'mvp'
    function = list(LIBRARY)
    point = None
    p = (1, None)
    n = (1, None)
    epsilons = None
    m = (2, None)
    analytic_extrema = None

    _defaults = {**RunConfig._defaults, 'function': 'aronsson', 'point': [1.0, 0.0], 'p': math.inf,
                 'n': None, 'epsilons': [0.1, 0.05, 0.025, 0.0125], 'm': 8, 'analytic_extrema': False}
    _kinds = {**RunConfig._kinds, 'function': str_value, 'point': float_list, 'p': float_value,
              'n': optional(int_value), 'epsilons': float_list, 'm': int_value,
              'analytic_extrema': bool_value}
    _strictly_positive = ('epsilons',)

    def _validate(self):
        if self.n is None:
            self.n = len(self.point)
        if self.n != len(self.point):
            raise ConfigError(f"point has {len(self.point)} coordinates, n = {self.n}")
        if len(self.epsilons) < 3:
            raise ConfigError("epsilons needs at least three values")
        self._guard(GameParams, self.n, self.p, min(self.epsilons), for_mean_value=True)
        self.test_function = self._guard(get_test_function, self.function, self.p, self.n)


class OracleConfig(RunConfig):
    command = 'oracle'


CONFIGS = {cls.command: cls for cls in (SolveConfig, ParabolicConfig, ValueConfig, CylinderRunConfig,
                                        HarnackConfig, MeanValueConfig, OracleConfig)}
