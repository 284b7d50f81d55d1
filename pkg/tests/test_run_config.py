import pytest

from data.models.options import DEFAULT_SEED
from data.models.run_config import RunConfig, Task, ExactMethod
from helpers.exceptions import ConfigError, PresetError

GROUP_TESTING = {'preset': 'group_testing', 'theta_star': [0.07, 0.93, 0.96]}
GROUP_SIZES = {'kind': 'finite_set', 'first': 1, 'last': 61}


def exact_config(**changes) -> dict:
    data = {'task': 'exact', 'model': GROUP_TESTING, 'space': GROUP_SIZES, 'criterion': {'kind': 'D'}, 'n': 12}
    data.update(changes)
    return data


def test_exact_config():
    config = RunConfig.from_json(exact_config(seed=5, exact={'method': 'rounding'}))
    assert config.task == Task.EXACT
    assert config.n == 12
    assert config.method == ExactMethod.ROUNDING
    assert config.model.q == 3 and config.space.size == 61
    assert config.anneal.seed == 5


def test_missing_seed_uses_the_default():
    config = RunConfig.from_json(exact_config())
    assert config.seed == DEFAULT_SEED
    assert config.anneal.seed == DEFAULT_SEED


def test_configuration_echo_can_be_read_back():
    config = RunConfig.from_json(exact_config(anneal={'alpha': 0.8, 'M': 4}))
    echoed = RunConfig.from_json(config.to_json())
    assert echoed.to_json() == config.to_json()


def test_task_argument_beats_the_file():
    config = RunConfig.from_json(exact_config(task='approx'), Task.EXACT)
    assert config.task == Task.EXACT


@pytest.mark.parametrize('data', [
    exact_config(n=None),
    exact_config(n=0),
    exact_config(task='teleport'),
    exact_config(criterion={'kind': 'c', 'c': [1, 0]}),
    exact_config(space={'kind': 'grid', 'low': [0, 0], 'high': [1, 1], 'levels': 5}),
    exact_config(space={'kind': 'sphere'}),
    exact_config(anneal={'alpha': 1.5}),
    exact_config(criterion={'kind': 'E'}),
    {'task': 'approx', 'model': GROUP_TESTING, 'criterion': {'kind': 'D'}},
    {'task': 'verify', 'model': GROUP_TESTING, 'space': GROUP_SIZES, 'criterion': {'kind': 'D'}},
    {'task': 'maximin_approx', 'space': GROUP_SIZES, 'objectives': [{'model': GROUP_TESTING}]},
    {'task': 'preset'},
])
def test_invalid_configs(data):
    with pytest.raises(ConfigError):
        RunConfig.from_json(data)


def test_unknown_preset_keeps_its_own_error():
    with pytest.raises(PresetError):
        RunConfig.from_json(exact_config(model={'preset': 'logit9', 'theta_star': [1]}))


def test_maximin_config():
    data = {
        'task': 'maximin_approx',
        'space': {'kind': 'grid', 'low': [0], 'high': [500], 'levels': 201},
        'objectives': [
            {'model': {'preset': 'dose_linear', 'theta_star': [60, 0.56]}, 'criterion': {'kind': 'A'}},
            {'model': {'preset': 'dose_emax', 'theta_star': [60, 294, 25]}, 'criterion': {'kind': 'A'}},
        ],
    }
    config = RunConfig.from_json(data)
    assert [objective.criterion.c_matrix.shape for objective in config.objectives] == [(2, 2), (3, 3)]


def test_preset_config():
    config = RunConfig.from_json({'task': 'preset', 'application': 'app4', 'n_values': [10], 'theta_stars': [[1, 2]]})
    assert config.n_values == (10,)
    assert config.theta_stars == ((1.0, 2.0),)
