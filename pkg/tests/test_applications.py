import json

import numpy as np
import pandas as pd
import pytest

from data.models.criterion import CriterionKind
from data.models.options import AnnealConfig, ApproxSolveOptions
from helpers.applications import ApplicationId, build_application, run_application
from helpers.exceptions import ConfigError, ExternalParametersRequiredError
from helpers.pipeline import DesignPipeline
from integrations.filesystem.result_directory import ResultDirectory

DOSE_THETAS = ([60, 0.56], [60, 294, 25], [60, 340, 107.14], [49.62, 290.51, 150, 45.51])


def test_unknown_application():
    with pytest.raises(ConfigError):
        ApplicationId.parse('app9')


def test_dose_suite_needs_parameter_vectors():
    with pytest.raises(ExternalParametersRequiredError):
        build_application(ApplicationId.APP4)


def test_dose_suite_structure():
    application = build_application(ApplicationId.APP4, DOSE_THETAS)
    assert [study.label for study in application.studies] == ['maximin_A', 'maximin_D']
    a_study, d_study = application.studies
    assert [objective.model.q for objective in a_study.objectives] == [2, 3, 3, 4]
    assert all(objective.criterion.kind == CriterionKind.TRACE_C for objective in a_study.objectives)
    assert all(objective.criterion.is_d for objective in d_study.objectives)
    assert a_study.space.size == 201


def test_grid_study_is_relative_to_the_finest_grid():
    application = build_application(ApplicationId.APP1_CASE_II)
    assert application.relative_to == 'N81x81'
    assert [study.space.size for study in application.studies] == [441, 961, 1681, 2601, 6561]


def test_group_testing_application(fast_anneal, tmp_path):
    pipeline = DesignPipeline(ApproxSolveOptions(), fast_anneal, workers=2)
    rows = run_application(build_application(ApplicationId.APP2), pipeline, ResultDirectory(tmp_path), n_values=(12,))

    obtained = {(row['study'], row['quantity']): row for row in rows}
    assert obtained[('D', 'loss')]['obtained'] == pytest.approx(0.1448, abs=6e-5)
    assert obtained[('D', 'support_size')]['obtained'] == 3
    assert obtained[('c', 'loss')]['obtained'] == pytest.approx(0.0354, abs=5e-4)
    assert obtained[('D', 'modified_efficiency n=12')]['obtained'] >= 0.995
    assert obtained[('D', 'modified_efficiency n=12')]['reported'] == 1.0

    comparison = pd.read_csv(tmp_path / 'comparison.csv')
    assert list(comparison.columns) == ['study', 'quantity', 'obtained', 'reported']
    assert (tmp_path / 'D' / 'n12' / 'design.csv').exists()
    assert (tmp_path / 'c' / 'dprofile.csv').exists()


def obtained_values(rows):
    return {(row['study'], row['quantity']): row['obtained'] for row in rows}


@pytest.mark.slow
def test_interaction_model_on_the_unit_square(tmp_path):
    pipeline = DesignPipeline(ApproxSolveOptions(), AnnealConfig(), workers=4)
    rows = run_application(build_application(ApplicationId.APP1_CASE_I), pipeline, ResultDirectory(tmp_path))
    obtained = obtained_values(rows)

    weights = np.asarray(json.loads((tmp_path / 'D' / 'design.json').read_text())['weights'])
    assert np.sum(weights > 0.01) == 5
    assert np.sum(weights <= 0.01) <= 1
    for n, floor in ((10, 0.97), (15, 0.97), (20, 0.99)):
        assert obtained[('D', f"modified_efficiency n={n}")] >= floor


@pytest.mark.slow
def test_grid_refinement_against_the_finest_grid(tmp_path):
    pipeline = DesignPipeline(ApproxSolveOptions(), AnnealConfig(restarts=2), workers=2)
    rows = run_application(build_application(ApplicationId.APP1_CASE_II), pipeline, ResultDirectory(tmp_path))
    obtained = obtained_values(rows)

    for levels in (21, 31, 41, 51):
        assert obtained[(f"N{levels}x{levels}", 'efficiency')] >= 0.97
    # 21, 41 and 81 levels on the same square are nested grids
    nested = [obtained[(f"N{levels}x{levels}", 'loss')] for levels in (21, 41, 81)]
    for coarse, fine in zip(nested, nested[1:]):
        assert fine <= coarse * (1 + 1e-5)


@pytest.mark.slow
def test_seven_factor_logistic_model(tmp_path):
    pipeline = DesignPipeline(ApproxSolveOptions(), AnnealConfig(), workers=4)
    rows = run_application(build_application(ApplicationId.APP3), pipeline, ResultDirectory(tmp_path))
    obtained = obtained_values(rows)

    assert obtained[('D', 'loss')] <= 4.950
    assert obtained[('D', 'support_size')] <= 35
    assert obtained[('D', 'modified_efficiency n=30')] >= 0.95
