import numpy as np
import pytest

from data.models.criterion import Criterion, CriterionKind
from data.models.design import WEIGHT_SUM_TOLERANCE, ApproximateDesign, ExactDesign
from data.models.design_space import DesignSpace, SpaceKind
from data.models.maximin_problem import MaximinProblem, Objective
from data.models.options import AnnealConfig, ApproxSolveOptions
from helpers.spaces import enumerate_grid


def test_duplicate_points_are_merged():
    design = ApproximateDesign([1.0, 2.0, 1.0], [0.25, 0.5, 0.25])
    assert design.size == 2
    assert design.weights == pytest.approx([0.5, 0.5])


def test_weight_sums_within_tolerance_are_renormalized():
    design = ApproximateDesign([1.0, 2.0], [0.5, 0.5 + 0.5 * WEIGHT_SUM_TOLERANCE])
    assert design.weights.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        ApproximateDesign([1.0, 2.0], [0.5, 0.5 + 2 * WEIGHT_SUM_TOLERANCE])


def test_near_duplicates_merge_through_chains():
    # 0 and 1.2e-9 are only linked through the middle point
    design = ExactDesign([0.0, 6e-10, 1.2e-9, 1.0], [1, 2, 3, 4])
    assert design.size == 2
    assert design.points[:, 0].tolist() == [0.0, 1.0]
    assert design.counts.tolist() == [6, 4]


def test_distinct_grid_points_are_all_kept():
    design = ApproximateDesign.uniform(enumerate_grid(DesignSpace.grid((-1.0,) * 7, (1.0,) * 7, 4)))
    assert design.size == 4 ** 7
    assert design.weights == pytest.approx(np.full(4 ** 7, 4.0 ** -7))


@pytest.mark.parametrize('points, weights', [
    ([1.0, 2.0], [0.5, 0.6]),
    ([1.0, 2.0], [1.5, -0.5]),
    ([1.0, 2.0], [1.0]),
    ([], []),
])
def test_invalid_approximate_designs(points, weights):
    with pytest.raises(ValueError):
        ApproximateDesign(points, weights)


def test_pruning_renormalizes():
    design = ApproximateDesign([1.0, 2.0, 3.0], [0.59995, 0.4, 0.00005]).pruned(1e-4)
    assert design.points[:, 0].tolist() == [1.0, 2.0]
    assert design.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_exact_design_drops_empty_points():
    design = ExactDesign([1.0, 17.0, 61.0], [4, 0, 8])
    assert design.n == 12 and design.size == 2
    assert design.weights == pytest.approx([1 / 3, 2 / 3])


def test_exact_design_runs_and_back():
    design = ExactDesign([17.0, 1.0], [2, 3])
    assert design.runs[:, 0].tolist() == [17.0, 17.0, 1.0, 1.0, 1.0]
    rebuilt = ExactDesign.from_runs(design.runs)
    assert rebuilt.counts.tolist() == [2, 3]


@pytest.mark.parametrize('counts', [[1.5, 2], [-1, 3], [0, 0]])
def test_invalid_exact_designs(counts):
    with pytest.raises(ValueError):
        ExactDesign([1.0, 2.0], counts)


def test_exact_json_checks_the_declared_run_count():
    with pytest.raises(ValueError):
        ExactDesign.from_json({'n': 5, 'points': [[1.0], [2.0]], 'counts': [2, 2]})


def test_approximate_json_keeps_full_precision():
    design = ApproximateDesign([[0.0, 0.25], [1.0, 2.0 / 3.0]], [1.0 / 3.0, 2.0 / 3.0])
    loaded = ApproximateDesign.from_json(design.to_json())
    assert np.array_equal(loaded.points, design.points)
    assert loaded.weights == pytest.approx(design.weights, abs=1e-12)


def test_sorted_designs_are_lexicographic():
    design = ApproximateDesign([[1.0, 0.0], [0.0, 1.0], [0.0, 0.5]], [0.2, 0.3, 0.5]).sorted()
    assert design.points.tolist() == [[0.0, 0.5], [0.0, 1.0], [1.0, 0.0]]
    assert design.weights == pytest.approx([0.5, 0.3, 0.2])


def test_space_json():
    assert DesignSpace.from_json({'kind': 'finite_set', 'first': 1, 'last': 61}).size == 61
    grid = DesignSpace.from_json({'kind': 'grid', 'low': [0, 0], 'high': [2, 2], 'levels': 21})
    assert grid.kind == SpaceKind.GRID and grid.levels == (21, 21) and grid.size == 441
    assert DesignSpace.from_json(grid.to_json()).levels == grid.levels


@pytest.mark.parametrize('build', [
    lambda: DesignSpace.box((1.0,), (0.0,)),
    lambda: DesignSpace.grid((0.0,), (1.0,), 1),
    lambda: DesignSpace.finite_set([1.0, 1.0]),
    lambda: DesignSpace.box((0.0, 0.0), (1.0,)),
])
def test_invalid_spaces(build):
    with pytest.raises(ValueError):
        build()


def test_integer_lattice_detection():
    assert DesignSpace.integer_range(1, 61).is_integer_lattice
    assert not DesignSpace.finite_set([1.0, 3.0, 4.0]).is_integer_lattice


@pytest.mark.parametrize('data, kind, label', [
    ({'kind': 'D'}, CriterionKind.D, 'D'),
    ({'kind': 'A'}, CriterionKind.TRACE_C, 'A'),
    ({'kind': 'c', 'c': [1, 0, 0]}, CriterionKind.TRACE_C, 'c'),
    ({'kind': 'TraceC', 'C': [[1, 0], [0, 1], [0, 0]], 'label': 'L'}, CriterionKind.TRACE_C, 'L'),
])
def test_criterion_json(data, kind, label):
    criterion = Criterion.from_json(data, 3)
    assert criterion.kind == kind and criterion.label == label
    assert criterion.fits(3)


def test_unknown_criterion_kind():
    with pytest.raises(ValueError):
        Criterion.from_json({'kind': 'E'}, 3)


def test_criterion_matrix_shape_is_checked():
    with pytest.raises(ValueError):
        Criterion.trace(np.ones((2, 3)))


def test_maximin_problem_validation(linear_model, quadratic_model):
    objectives = (Objective(linear_model, Criterion.d()), Objective(quadratic_model, Criterion.d()))
    assert MaximinProblem(objectives, (1.0, 2.0)).size == 2
    with pytest.raises(ValueError):
        MaximinProblem(objectives[:1], (1.0,))
    with pytest.raises(ValueError):
        MaximinProblem(objectives, (1.0,))
    with pytest.raises(ValueError):
        MaximinProblem(objectives, (1.0, 0.0))


def test_anneal_defaults_follow_the_initial_loss():
    t0, t_min, k = AnnealConfig().resolve(0.2, 12)
    assert t0 == pytest.approx(0.02)
    assert t_min == pytest.approx(2e-8)
    assert k == 600


def test_anneal_json_names():
    config = AnnealConfig.from_json({'T0': 1.0, 'T_min': 1e-3, 'alpha': 0.8, 'K': 40, 'M': 4, 'seed': 9})
    assert (config.t0, config.t_min, config.alpha, config.k, config.restarts, config.seed) == (1.0, 1e-3, 0.8, 40, 4, 9)
    assert AnnealConfig.from_json(config.to_json()) == config


@pytest.mark.parametrize('changes', [{'alpha': 1.0}, {'restarts': 0}, {'t0': 1.0, 't_min': 2.0}, {'seed': -1}])
def test_invalid_anneal_configs(changes):
    with pytest.raises(ValueError):
        AnnealConfig(**changes)


def test_prune_threshold_stays_below_genuine_support():
    with pytest.raises(ValueError):
        ApproxSolveOptions(prune_threshold=0.01)
