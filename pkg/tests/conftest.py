import pytest

from data.models.criterion import Criterion
from data.models.design_space import DesignSpace
from data.models.options import AnnealConfig
from helpers.model_registry import make_preset, PresetId

GROUP_TESTING_THETA = (0.07, 0.93, 0.96)


@pytest.fixture
def linear_model():
    return make_preset(PresetId.DOSE_LINEAR, (0.0, 1.0))


@pytest.fixture
def quadratic_model():
    return make_preset(PresetId.POLY_LINEAR, (0.0, 0.0, 0.0))


@pytest.fixture
def group_testing_model():
    return make_preset(PresetId.GROUP_TESTING, GROUP_TESTING_THETA)


@pytest.fixture
def group_sizes():
    return DesignSpace.integer_range(1, 61)


@pytest.fixture
def c_first():
    return Criterion.c((1.0, 0.0, 0.0))


@pytest.fixture
def fast_anneal():
    # Faster cooling and shorter levels than the defaults; the settling exit is switched off
    return AnnealConfig(alpha=0.8, k=120, delta=1e-12, restarts=3, seed=7)
