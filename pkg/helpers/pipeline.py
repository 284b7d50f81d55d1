import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from data.models.criterion import Criterion
from data.models.design import ApproximateDesign, ExactDesign
from data.models.design_space import DesignSpace
from data.models.maximin_problem import MaximinProblem, Objective
from data.models.model_spec import ModelSpec
from data.models.options import ApproxSolveOptions, AnnealConfig
from data.models.run_config import ExactMethod
from data.models.solve_report import SolveReport, SearchReport
from data.repositories.result import ResultRepository
from helpers.annealer import Annealer
from helpers.approx_solver import ApproxSolver, default_tolerance, equivalence_profile
from helpers.efficiency import efficiency, modified_efficiency
from helpers.exceptions import InfeasibleDesignError, ConfigError
from helpers.information import design_loss
from helpers.json import finite_or_none
from helpers.rounding import theorem1_construction
from helpers.spaces import contains, enumerate_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ApproxOutcome:
    design: ApproximateDesign
    report: SolveReport

    def to_json(self) -> dict:
        return {'design': self.design.sorted().to_json(), **self.report.to_json()}


@dataclass(frozen=True, eq=False)
class ExactOutcome:
    design: ExactDesign
    reference: ApproximateDesign
    loss: float
    modified_efficiency: float
    efficiencies: tuple[float, ...] = ()
    search: Optional[SearchReport] = None

    def to_json(self) -> dict:
        data = {
            'design': self.design.sorted().to_json(),
            'loss': finite_or_none(self.loss),
            'modified_efficiency': finite_or_none(self.modified_efficiency),
            'method': 'anneal' if self.search is not None else 'rounding',
        }
        if self.efficiencies:
            data['efficiencies'] = list(self.efficiencies)
            data['min_efficiency'] = min(self.efficiencies)
        if self.search is not None:
            data['search'] = self.search.to_json()
        return data


class DesignPipeline:
    """Runs the solvers end to end on one problem and writes what they produce."""

    def __init__(self, approx: ApproxSolveOptions, anneal: AnnealConfig, workers: Optional[int] = None):
        self.solver = ApproxSolver(approx)
        self.annealer = Annealer(anneal, workers)

    def resolved_settings(self) -> dict:
        """Defaults the solvers resolved during this run, keyed like the run configuration."""
        settings: dict = {'approx': {}, 'anneal': {}}
        if self.solver.resolved_tolerances:
            settings['approx']['eq_tolerance'] = _collapse(self.solver.resolved_tolerances)
        if self.annealer.resolved_temperatures:
            t0, t_min, k = zip(*self.annealer.resolved_temperatures)
            settings['anneal'].update({'T0': _collapse(t0), 'T_min': _collapse(t_min), 'K': _collapse(k)})
        return settings

    def approximate(self, model: ModelSpec, criterion: Criterion, space: DesignSpace, results: ResultRepository) -> ApproxOutcome:
        candidates = enumerate_grid(space)
        design, report = self.solver.solve_single(model, criterion, candidates)

        results.save_design(design, {'loss': report.loss, 'max_derivative': report.max_derivative, 'verdict': report.verdict})
        results.save_profile(candidates, equivalence_profile(model, criterion, design, candidates))
        if design.p == 1:
            results.save_cdf(design)
        return ApproxOutcome(design, report)

    def exact(self, model: ModelSpec, criterion: Criterion, space: DesignSpace, n: int, results: ResultRepository,
              method: ExactMethod = ExactMethod.ANNEAL, reference: Optional[ApproximateDesign] = None) -> ExactOutcome:
        if reference is None:
            reference = self.solver.solve_single(model, criterion, enumerate_grid(space))[0]
        else:
            _check_membership(space, reference)

        search = None
        design = None
        if method == ExactMethod.ROUNDING:
            try:
                design = theorem1_construction(reference, n)
            except InfeasibleDesignError as error:
                logger.warning(f"Rounding is not possible, falling back to annealing: {error}")
        if design is None:
            design, search = self.annealer.search(model, criterion, reference, n, space)
            results.save_search(search)

        loss = design_loss(model, criterion, design)
        score = modified_efficiency(criterion, model, design, reference)
        results.save_design(design, {'loss': loss, 'modified_efficiency': score})
        if design.p == 1:
            results.save_cdf(design)

        logger.info(f"Exact design with n={n}: loss {loss:.6g}, modified efficiency {score:.4f}")
        return ExactOutcome(design, reference, loss, score, search=search)

    def maximin(self, objectives: Sequence[Objective], space: DesignSpace, results: ResultRepository) -> tuple[MaximinProblem, ApproxOutcome]:
        candidates = enumerate_grid(space)
        problem = self.solver.build_maximin_problem(objectives, candidates)
        design, report = self.solver.solve_maximin(problem, candidates)

        results.save_design(design, {'min_efficiency': report.min_efficiency, 'efficiencies': report.efficiencies})
        if design.p == 1:
            results.save_cdf(design)
        return problem, ApproxOutcome(design, report)

    def maximin_exact(self, problem: MaximinProblem, reference: ApproximateDesign, space: DesignSpace, n: int,
                      results: ResultRepository) -> ExactOutcome:
        design, search = self.annealer.search_maximin(problem, reference, n, space)
        results.save_search(search)

        efficiencies = tuple(
            efficiency(objective.criterion, objective.model, design, loss)
            for objective, loss in zip(problem.objectives, problem.reference_losses)
        )
        results.save_design(design, {'min_efficiency': min(efficiencies), 'efficiencies': list(efficiencies)})
        if design.p == 1:
            results.save_cdf(design)

        logger.info(f"Exact maximin design with n={n}: min efficiency {min(efficiencies):.4f}")
        return ExactOutcome(design, reference, -min(efficiencies), search.best.modified_efficiency, efficiencies, search)

    def verify(self, model: ModelSpec, criterion: Criterion, design: Union[ApproximateDesign, ExactDesign], space: DesignSpace,
               results: ResultRepository, tolerance: Optional[float] = None) -> dict:
        candidates = enumerate_grid(space)
        approx = design.to_approximate() if isinstance(design, ExactDesign) else design

        profile = equivalence_profile(model, criterion, approx, candidates)
        best = int(np.argmax(profile))
        if tolerance is None:
            uniform = design_loss(model, criterion, ApproximateDesign.uniform(candidates))
            tolerance = default_tolerance(criterion, uniform, model.q)
        self.solver.resolved_tolerances.append(tolerance)

        results.save_profile(candidates, profile)
        verdict = 'optimal' if profile[best] <= tolerance else 'not optimal'
        logger.info(f"Verified design: max d = {profile[best]:.6g} at {candidates[best].tolist()} ({verdict})")
        return {
            'loss': finite_or_none(design_loss(model, criterion, approx)),
            'max_derivative': float(profile[best]),
            'argmax_point': candidates[best].tolist(),
            'eq_tolerance': tolerance,
            'verdict': verdict,
        }


def _collapse(values: Sequence) -> Union[float, list]:
    # One value for a single solve, the values in run order for several
    values = list(values)
    return values[0] if len(set(values)) == 1 else values


def _check_membership(space: DesignSpace, design: ApproximateDesign) -> None:
    outside = [point.tolist() for point in design.points if not contains(space, point)]
    if outside:
        raise ConfigError(f"The reference design has points outside the design space: {outside[:3]}")
