import json
import logging

import pandas as pd
import pytest

from data.models.criterion import Criterion
from data.models.design import ApproximateDesign, ExactDesign
from data.models.design_space import DesignSpace
from data.models.options import ApproxSolveOptions
from data.models.run_config import ExactMethod
from helpers.exceptions import ConfigError
from helpers.pipeline import DesignPipeline
from integrations.filesystem.result_directory import ResultDirectory


@pytest.fixture
def pipeline(fast_anneal):
    return DesignPipeline(ApproxSolveOptions(), fast_anneal, workers=2)


def test_approximate_writes_design_profile_and_cdf(pipeline, group_testing_model, group_sizes, tmp_path):
    outcome = pipeline.approximate(group_testing_model, Criterion.d(), group_sizes, ResultDirectory(tmp_path))
    assert outcome.report.converged

    design = pd.read_csv(tmp_path / 'design.csv')
    assert design['x1'].tolist() == [1, 17, 61]
    profile = pd.read_csv(tmp_path / 'dprofile.csv')
    assert len(profile) == 61 and list(profile.columns) == ['x1', 'd']
    cdf = pd.read_csv(tmp_path / 'cdf.csv')
    assert cdf['cumulative_weight'].iloc[-1] == pytest.approx(1.0)

    summary = json.loads((tmp_path / 'design.json').read_text())
    assert summary['verdict'] == 'optimal'
    assert outcome.to_json()['design']['points'] == [[1.0], [17.0], [61.0]]


def test_rounding_method_skips_the_search(pipeline, group_testing_model, group_sizes, tmp_path):
    reference = ApproximateDesign.uniform([1.0, 17.0, 61.0])
    outcome = pipeline.exact(group_testing_model, Criterion.d(), group_sizes, 12, ResultDirectory(tmp_path),
                             method=ExactMethod.ROUNDING, reference=reference)
    assert outcome.search is None
    assert outcome.design.counts.tolist() == [4, 4, 4]
    assert outcome.modified_efficiency == pytest.approx(1.0)
    assert outcome.to_json()['method'] == 'rounding'
    assert not (tmp_path / 'restarts.csv').exists()


def test_rounding_falls_back_to_annealing(pipeline, group_testing_model, group_sizes, c_first, tmp_path, caplog):
    reference = ApproximateDesign([1.0, 16.0, 61.0], [0.1310, 0.6279, 0.2411])
    with caplog.at_level(logging.WARNING):
        outcome = pipeline.exact(group_testing_model, c_first, group_sizes, 5, ResultDirectory(tmp_path),
                                 method=ExactMethod.ROUNDING, reference=reference)
    assert 'falling back to annealing' in caplog.text
    assert outcome.search is not None and outcome.design.n == 5
    assert (tmp_path / 'restarts.csv').exists()
    assert (tmp_path / f'trace_{outcome.search.best_restart}.csv').exists()


def test_reference_must_lie_in_the_space(pipeline, group_testing_model, group_sizes, tmp_path):
    reference = ApproximateDesign([1.0, 16.5, 61.0], [0.3, 0.4, 0.3])
    with pytest.raises(ConfigError):
        pipeline.exact(group_testing_model, Criterion.d(), group_sizes, 12, ResultDirectory(tmp_path), reference=reference)


def test_annealed_exact_design(pipeline, group_testing_model, group_sizes, tmp_path):
    outcome = pipeline.exact(group_testing_model, Criterion.d(), group_sizes, 12, ResultDirectory(tmp_path))
    assert outcome.design.n == 12
    assert outcome.modified_efficiency >= 0.995
    restarts = pd.read_csv(tmp_path / 'restarts.csv')
    assert len(restarts) == 3
    assert (restarts['verdict'] == 'best').sum() == 1


def test_verify_flags_a_suboptimal_design(pipeline, linear_model, tmp_path):
    space = DesignSpace.finite_set([-1.0, 0.0, 1.0])
    verdict = pipeline.verify(linear_model, Criterion.d(), ApproximateDesign.uniform([-1.0, 0.0, 1.0]), space, ResultDirectory(tmp_path))
    assert verdict['max_derivative'] == pytest.approx(0.5)
    assert verdict['argmax_point'] == [-1.0]
    assert verdict['verdict'] == 'not optimal'

    exact = ExactDesign([-1.0, 1.0], [3, 3])
    verdict = pipeline.verify(linear_model, Criterion.d(), exact, space, ResultDirectory(tmp_path / 'exact'))
    assert verdict['verdict'] == 'optimal'
    assert verdict['loss'] == pytest.approx(1.0)
