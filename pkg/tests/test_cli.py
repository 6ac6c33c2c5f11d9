import os

import pytest

from towlab import __version__
from towlab.cli import EXPERIMENTS, build_parser, main
from towlab.experiments.config import CONFIGS


def _files(directory):
    return sorted(os.listdir(directory))


def test_every_command_is_wired():
    assert set(EXPERIMENTS) == set(CONFIGS)


def test_solve(tmp_path, capsys):
    status = main(['solve', '--p', '3', '--eps', '0.25', '--payoff', 'step:0.5', '--quiet',
                   '--output-dir', str(tmp_path)])
    assert status == 0
    assert _files(tmp_path) == ['solve_p3_eps0p25_k4.csv', 'solve_p3_eps0p25_k4.json']
    assert capsys.readouterr().out == ''


def test_unknown_flag_exits_with_one(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(['solve', '--bogus', '1'])
    assert exit_info.value.code == 1
    assert "unrecognized arguments" in capsys.readouterr().err


def test_flags_cannot_be_abbreviated():
    with pytest.raises(SystemExit) as exit_info:
        main(['solve-parabolic', '--hor', '0.1'])
    assert exit_info.value.code == 1


def test_missing_command_exits_with_one():
    with pytest.raises(SystemExit) as exit_info:
        main([])
    assert exit_info.value.code == 1


def test_help_and_version(capsys):
    for argv in (['--help'], ['value', '--help'], ['--version']):
        with pytest.raises(SystemExit) as exit_info:
            main(argv)
        assert exit_info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_dump_config(tmp_path, capsys):
    config_file = tmp_path / "run.cfg"
    config_file.write_text("p = 4\nepsilon = 0.2\n")
    assert main(['solve', '--config', str(config_file), '--eps', '0.1', '--dump-config']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert 'p = 4.0' in lines
    assert 'epsilon = 0.1' in lines


def test_invalid_configuration_returns_one(tmp_path, capsys):
    assert main(['solve', '--p', '1', '--output-dir', str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert err.startswith("towlab solve: error:")
    assert main(['mvp', '--point', '1,0,0', '--n', '2', '--quiet']) == 1
    assert main(['value', '--player-one', 'spin', '--quiet', '--output-dir', str(tmp_path)]) == 1


def test_missing_config_file_returns_one(tmp_path):
    assert main(['oracle', '--config', str(tmp_path / "nope.cfg")]) == 1


def test_value_is_independent_of_threads(tmp_path):
    outputs = []
    for threads in ('1', '2'):
        directory = tmp_path / f"threads{threads}"
        status = main(['value', '--p', '3', '--eps', '0.2', '--start', '0.4', '--trials', '300',
                       '--player-one', 'pull:1', '--player-two', 'pull:0', '--seed', '7', '--threads', threads,
                       '--quiet', '--output-dir', str(directory)])
        assert status == 0
        (name,) = [f for f in _files(directory) if f.endswith('.csv')]
        outputs.append((name, (directory / name).read_bytes()))
    assert outputs[0] == outputs[1]



def test_harnack(tmp_path):
    status = main(['harnack', '--p', '6', '--eps', '0.5', '--trials', '100', '--start=-0.5,0',
                   '--target', '0.5,0', '--quiet', '--output-dir', str(tmp_path)])
    assert status == 0
    assert _files(tmp_path) == ['harnack_n2_r2_seed0.csv', 'harnack_n2_r2_seed0.json']

def test_non_convergence_exit_code(tmp_path):
    with pytest.warns(Warning):
        status = main(['solve', '--p', '3', '--eps', '0.25', '--payoff', 'step:0.5', '--max-sweeps', '1',
                       '--quiet', '--output-dir', str(tmp_path)])
    assert status == 2


def test_parser_defaults_are_unset():
    args = vars(build_parser().parse_args(['cylinder']))
    assert args['radius'] is None
    assert args['verbose'] is None
