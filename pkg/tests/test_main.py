import json

import pandas as pd
import pytest

from data.models.options import DEFAULT_SEED
from helpers.approx_solver import DEFAULT_TOLERANCE_RATIO
from main import main

GROUP_TESTING = {'preset': 'group_testing', 'theta_star': [0.07, 0.93, 0.96]}
GROUP_SIZES = {'kind': 'finite_set', 'first': 1, 'last': 61}
FAST_ANNEAL = {'alpha': 0.8, 'K': 120, 'delta': 1e-12, 'M': 3}


def write_config(tmp_path, data: dict, name: str = 'config.json') -> str:
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def read_json(path):
    return json.loads(path.read_text())


def test_approximate_design(tmp_path):
    config = write_config(tmp_path, {'model': GROUP_TESTING, 'space': GROUP_SIZES, 'criterion': {'kind': 'D'}})
    assert main(['approx', '--config', config, '--out', str(tmp_path / 'out')]) == 0

    report = read_json(tmp_path / 'out' / 'report.json')
    assert report['result']['verdict'] == 'optimal'
    assert report['result']['loss'] == pytest.approx(0.1448, abs=6e-5)
    assert report['config']['seed'] == DEFAULT_SEED
    assert report['config']['task'] == 'approx'
    # The echo carries the tolerance the solver resolved, not the unset default
    assert report['config']['approx']['eq_tolerance'] == pytest.approx(DEFAULT_TOLERANCE_RATIO * 3)
    assert read_json(tmp_path / 'out' / 'design.json')['points'] == [[1.0], [17.0], [61.0]]


def test_verify_reports_a_suboptimal_design(tmp_path):
    design = tmp_path / 'uniform.csv'
    design.write_text('x1,weight\n-1,0.333333\n0,0.333333\n1,0.333334\n')
    config = write_config(tmp_path, {
        'model': {'preset': 'dose_linear', 'theta_star': [0, 1]},
        'space': {'kind': 'finite_set', 'points': [-1, 0, 1]},
        'criterion': {'kind': 'D'},
        'design': str(design),
    })
    assert main(['verify', '--config', config, '--out', str(tmp_path / 'out')]) == 0

    result = read_json(tmp_path / 'out' / 'report.json')['result']
    assert result['max_derivative'] == pytest.approx(0.5, abs=1e-5)
    assert result['verdict'] == 'not optimal'
    assert (tmp_path / 'out' / 'dprofile.csv').exists()


def test_flags_override_the_configuration(tmp_path):
    config = write_config(tmp_path, {
        'model': GROUP_TESTING, 'space': GROUP_SIZES, 'criterion': {'kind': 'D'},
        'n': 5, 'seed': 3, 'anneal': FAST_ANNEAL, 'output': str(tmp_path / 'ignored'),
    })
    assert main(['exact', '--config', config, '--out', str(tmp_path / 'out'), '--n', '12', '--seed', '11', '--restarts', '2']) == 0

    report = read_json(tmp_path / 'out' / 'report.json')
    assert report['config']['n'] == 12
    assert report['config']['seed'] == 11
    assert report['config']['anneal']['M'] == 2
    assert report['config']['anneal']['K'] == 120
    assert report['config']['anneal']['T0'] == pytest.approx(0.01448, rel=1e-3)
    assert report['config']['anneal']['T_min'] == pytest.approx(1e-6 * report['config']['anneal']['T0'])
    assert report['config']['approx']['eq_tolerance'] is not None
    assert report['result']['design']['n'] == 12
    assert len(pd.read_csv(tmp_path / 'out' / 'restarts.csv')) == 2
    assert not (tmp_path / 'ignored').exists()


def test_exact_designs_do_not_depend_on_the_worker_count(tmp_path, monkeypatch):
    config = write_config(tmp_path, {
        'model': GROUP_TESTING, 'space': GROUP_SIZES, 'criterion': {'kind': 'c', 'c': [1, 0, 0]},
        'n': 11, 'anneal': FAST_ANNEAL,
    })
    outputs = []
    for workers in ('1', '4'):
        monkeypatch.setenv('design_workers', workers)
        output = tmp_path / f'workers{workers}'
        assert main(['exact', '--config', config, '--out', str(output)]) == 0
        outputs.append(output)

    first, second = outputs
    assert (first / 'design.csv').read_bytes() == (second / 'design.csv').read_bytes()
    assert (first / 'restarts.csv').read_bytes() == (second / 'restarts.csv').read_bytes()


def test_exact_maximin_run(tmp_path):
    config = write_config(tmp_path, {
        'space': {'kind': 'finite_set', 'points': [-1, -0.5, 0, 0.5, 1]},
        'objectives': [
            {'model': {'preset': 'poly_linear', 'theta_star': [0, 0]}, 'criterion': {'kind': 'D'}},
            {'model': {'preset': 'poly_linear', 'theta_star': [0, 0, 0]}, 'criterion': {'kind': 'D'}},
        ],
        'n': 6,
        'anneal': FAST_ANNEAL,
    })
    assert main(['maximin', '--config', config, '--out', str(tmp_path / 'out')]) == 0

    report = read_json(tmp_path / 'out' / 'report.json')
    assert report['config']['task'] == 'maximin_exact'
    assert len(report['result']['reference_losses']) == 2
    assert report['result']['exact']['design']['n'] == 6
    assert report['result']['approximate']['efficiency_bound'] >= report['result']['approximate']['min_efficiency']
    assert (tmp_path / 'out' / 'approximate' / 'design.csv').exists()
    assert (tmp_path / 'out' / 'design.csv').exists()


@pytest.mark.parametrize('data, code', [
    ({'model': {'preset': 'logit9', 'theta_star': [1]}, 'space': GROUP_SIZES, 'criterion': {'kind': 'D'}, 'n': 12}, 3),
    ({'model': GROUP_TESTING, 'space': GROUP_SIZES, 'criterion': {'kind': 'D'}}, 2),
    ({'model': {'preset': 'poly_linear', 'theta_star': [0, 0, 0]}, 'space': {'kind': 'finite_set', 'points': [0, 1]},
      'criterion': {'kind': 'D'}, 'n': 4}, 4),
])
def test_errors_become_exit_codes(tmp_path, capsys, data, code):
    config = write_config(tmp_path, data)
    assert main(['exact', '--config', config, '--out', str(tmp_path / 'out')]) == code

    error = read_json(tmp_path / 'out' / 'error.json')
    assert error['code'] == code
    printed = [line for line in capsys.readouterr().err.splitlines() if line.startswith('{')]
    assert json.loads(printed[-1])['code'] == code
    assert not (tmp_path / 'out' / 'report.json').exists()


def test_dose_suite_without_parameters(tmp_path):
    config = write_config(tmp_path, {'application': 'app4'})
    assert main(['preset', '--config', config, '--out', str(tmp_path / 'out')]) == 5
    assert read_json(tmp_path / 'out' / 'error.json')['error'] == 'ExternalParametersRequiredError'


def test_missing_configuration_file(tmp_path):
    assert main(['approx', '--config', str(tmp_path / 'absent.json'), '--out', str(tmp_path / 'out')]) == 2


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(['optimize', '--config', 'config.json'])
