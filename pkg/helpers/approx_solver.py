import logging
import math
import time
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import cho_solve
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp, softmax

from data.models.criterion import Criterion
from data.models.design import ApproximateDesign
from data.models.maximin_problem import MaximinProblem, Objective
from data.models.model_spec import ModelSpec
from data.models.options import ApproxSolveOptions
from data.models.solve_report import SolveReport
from helpers.exceptions import InfeasibleDesignError, DimensionError, DesignError
from helpers.information import (
    weighted_information, criterion_loss, cholesky, derivative_profile, derivative_scale, info_matrix,
)

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE_RATIO = 1e-5
# Support points of a certified optimum must sit within this many tolerances of d = 0
SUPPORT_TOLERANCE_FACTOR = 10.0
# Multiplicative updates never reach zero, so vanishing weights are cut below this
CLEANUP_WEIGHT = 1e-12
# Certified default solves keep descending to this fraction of the tolerance so split support points merge
CONSOLIDATION_RATIO = 1e-4
MAXIMIN_TOLERANCE = 1e-4
MAXIMIN_TEMPERATURES = (5e-2, 1e-2, 2e-3, 5e-4, 1e-4)
MAXIMIN_STAGE_ITERATIONS = 400


def default_tolerance(criterion: Criterion, uniform_loss: float, q: int) -> float:
    # The D derivative is already on a scale-free footing; trace-class derivatives scale with the loss
    return DEFAULT_TOLERANCE_RATIO * (q if criterion.is_d else uniform_loss)


def equivalence_profile(model: ModelSpec, criterion: Criterion, design: ApproximateDesign, candidates) -> np.ndarray:
    points = model.as_points(candidates)
    return derivative_profile(criterion, info_matrix(model, design), model.scaled_regressors(points))


def verify_equivalence(model: ModelSpec, criterion: Criterion, design: ApproximateDesign, candidates) -> tuple[float, np.ndarray]:
    points = model.as_points(candidates)
    profile = equivalence_profile(model, criterion, design, points)
    best = int(np.argmax(profile))
    return float(profile[best]), points[best].copy()


class ApproxSolver:
    """
    Optimal approximate designs on a finite candidate set.

    Single objectives are solved by vertex-exchange steps with exact line search, accelerated by
    multiplicative weight updates, and stopped by the equivalence theorem. Maximin designs are found
    by ascent on a log-sum-exp smoothing of the minimum efficiency with a decreasing temperature.
    """

    def __init__(self, options: Optional[ApproxSolveOptions] = None):
        self.options = options or ApproxSolveOptions()
        # Equivalence tolerance of every finished solve, in order
        self.resolved_tolerances: list[float] = []

    def solve_single(self, model: ModelSpec, criterion: Criterion, candidates) -> tuple[ApproximateDesign, SolveReport]:
        started = time.perf_counter()
        points = model.as_points(candidates)
        _check_criterion(model, criterion)

        scaled = model.scaled_regressors(points)
        weights, history, iterations, tolerance = self._optimize(criterion, scaled)
        self.resolved_tolerances.append(tolerance)

        matrix = weighted_information(scaled, weights)
        loss = criterion_loss(criterion, matrix)
        profile = derivative_profile(criterion, matrix, scaled)
        best = int(np.argmax(profile))
        converged = _certified(profile, weights, tolerance)

        if converged:
            logger.info(f"Solved {model.name}/{criterion.label} on {points.shape[0]} candidates: loss {loss:.6g} after {iterations} iterations")
        else:
            logger.warning(f"Solver for {model.name}/{criterion.label} stopped unverified after {iterations} iterations (max d = {profile[best]:.3g}, tolerance {tolerance:.3g})")

        support = weights > 0
        report = SolveReport(
            loss=loss,
            max_derivative=float(profile[best]),
            argmax_point=points[best].tolist(),
            eq_tolerance=tolerance,
            iterations=iterations,
            converged=converged,
            loss_history=history,
            elapsed_seconds=time.perf_counter() - started,
        )
        return ApproximateDesign(points[support], weights[support]), report

    def build_maximin_problem(self, objectives: Sequence[Objective], candidates) -> MaximinProblem:
        references = []
        for index, objective in enumerate(objectives):
            try:
                _, report = self.solve_single(objective.model, objective.criterion, candidates)
            except DesignError as error:
                raise InfeasibleDesignError(f"Objective {index} ({objective.model.name}, {objective.criterion.label}) cannot be solved: {error}") from error
            references.append(report.loss)
        return MaximinProblem(tuple(objectives), tuple(references))

    def solve_maximin(self, problem: MaximinProblem, candidates) -> tuple[ApproximateDesign, SolveReport]:
        started = time.perf_counter()
        first = problem.objectives[0].model
        points = first.as_points(candidates)
        for objective in problem.objectives:
            if objective.model.p != first.p:
                raise DimensionError("All maximin objectives must share one design space dimension")
            _check_criterion(objective.model, objective.criterion)

        composite = _Composite(problem, points)
        tolerance = self.options.eq_tolerance or MAXIMIN_TOLERANCE
        self.resolved_tolerances.append(tolerance)

        # Start from the best of the uniform design and every single-objective optimum
        starts = [np.full(points.shape[0], 1.0 / points.shape[0])]
        for index, objective in enumerate(problem.objectives):
            try:
                weights, _, _, _ = self._optimize(objective.criterion, composite.scaled[index])
            except DesignError as error:
                raise InfeasibleDesignError(f"Objective {index} ({objective.model.name}, {objective.criterion.label}) cannot be solved: {error}") from error
            starts.append(weights)

        start_values = [composite.min_efficiency(weights) for weights in starts]
        start = int(np.argmax(start_values))
        floor = start_values[start]
        weights = starts[start].copy()
        best_weights, best_value = weights.copy(), floor
        history = [-best_value]

        iterations = 0
        budget = min(self.options.max_iterations, MAXIMIN_STAGE_ITERATIONS)
        combined = np.zeros(points.shape[0])
        bound = math.inf
        for temperature in MAXIMIN_TEMPERATURES:
            for _ in range(budget):
                iterations += 1
                efficiencies, combined, _ = composite.ascent_direction(weights, temperature)
                smoothed = -temperature * logsumexp(-efficiencies / temperature)
                target = int(np.argmax(combined))
                # Concavity of the smoothed objective bounds the reachable minimum efficiency
                bound = min(bound, smoothed + max(0.0, float(combined[target])) + temperature * math.log(problem.size))
                if combined[target] <= tolerance:
                    break

                moved = composite.step(weights, combined, temperature, smoothed)
                if moved is None:
                    break
                weights = moved

                value = composite.min_efficiency(weights)
                if value > best_value:
                    best_weights, best_value = weights.copy(), value
                history.append(-best_value)
            logger.debug(f"Maximin temperature {temperature:g}: min efficiency {best_value:.6f}")

        pruned = _prune(best_weights, self.options.prune_threshold)
        if composite.min_efficiency(pruned) >= floor:
            best_weights = pruned
        efficiencies, combined, mixing = composite.ascent_direction(best_weights, MAXIMIN_TEMPERATURES[-1])
        target = int(np.argmax(combined))
        min_value = float(efficiencies.min())

        logger.info(f"Maximin design over {problem.size} objectives: min efficiency {min_value:.4f} after {iterations} iterations")

        support = best_weights > 0
        report = SolveReport(
            loss=-min_value,
            max_derivative=float(combined[target]),
            argmax_point=points[target].tolist(),
            eq_tolerance=tolerance,
            iterations=iterations,
            converged=bool(combined[target] <= tolerance),
            loss_history=history,
            efficiencies=efficiencies.tolist(),
            min_efficiency=min_value,
            mixing_weights=mixing.tolist(),
            efficiency_bound=max(bound, min_value),
            elapsed_seconds=time.perf_counter() - started,
        )
        return ApproximateDesign(points[support], best_weights[support] / best_weights[support].sum()), report

    def _optimize(self, criterion: Criterion, scaled: np.ndarray) -> tuple[np.ndarray, list[float], int, float]:
        count, q = scaled.shape
        if count < q:
            raise InfeasibleDesignError(f"{count} candidates cannot support a model with {q} parameters")

        weights = np.full(count, 1.0 / count)
        loss = criterion_loss(criterion, weighted_information(scaled, weights))
        # Uniform weights are singular only when no weighting of the candidates is invertible
        if math.isinf(loss):
            raise InfeasibleDesignError("No weighting of the candidates gives an invertible information matrix")

        tolerance = self.options.eq_tolerance or default_tolerance(criterion, loss, q)
        history = [loss]

        weights, iterations = self._descend(criterion, scaled, weights, tolerance, self.options.max_iterations, history, accelerate=True)

        # Pruning may break the certificate, so the pruned design is polished with exchange steps only
        pruned = _prune(weights, self.options.prune_threshold)
        if not math.isinf(criterion_loss(criterion, weighted_information(scaled, pruned))):
            weights = pruned
        remaining = max(self.options.max_iterations - iterations, self.options.max_iterations // 10)
        weights, polished = self._descend(criterion, scaled, weights, tolerance, remaining, None, accelerate=False)

        pruned = _prune(weights, self.options.prune_threshold)
        if not math.isinf(criterion_loss(criterion, weighted_information(scaled, pruned))):
            weights = pruned
        iterations += polished

        if self.options.eq_tolerance is None:
            weights, settled = self._consolidate(criterion, scaled, weights, tolerance)
            iterations += settled
        return weights, history, iterations, tolerance

    def _consolidate(self, criterion: Criterion, scaled: np.ndarray, weights: np.ndarray, tolerance: float) -> tuple[np.ndarray, int]:
        # Near the optimum one support point can spread its weight over neighbouring candidates
        budget = self.options.max_iterations
        settled, iterations = self._descend(criterion, scaled, weights, tolerance * CONSOLIDATION_RATIO, budget, None, accelerate=True)
        pruned = _prune(settled, self.options.prune_threshold)
        if math.isinf(criterion_loss(criterion, weighted_information(scaled, pruned))):
            return weights, iterations

        polished, extra = self._descend(criterion, scaled, pruned, tolerance, budget, None, accelerate=False)
        if not _certified(derivative_profile(criterion, weighted_information(scaled, polished), scaled), polished, tolerance):
            logger.debug("Consolidated design lost its certificate, keeping the polished one")
            return weights, iterations + extra
        return _prune(polished, self.options.prune_threshold), iterations + extra

    def _descend(self, criterion: Criterion, scaled: np.ndarray, weights: np.ndarray, tolerance: float, budget: int,
                 history: Optional[list[float]], accelerate: bool) -> tuple[np.ndarray, int]:
        q = scaled.shape[1]
        matrix = weighted_information(scaled, weights)
        loss = criterion_loss(criterion, matrix)

        for iteration in range(budget):
            profile = derivative_profile(criterion, matrix, scaled)
            if _certified(profile, weights, tolerance, settle_support=not accelerate):
                return weights, iteration

            if accelerate:
                updated = _multiplicative_update(criterion, weights, profile, loss, q)
                updated_matrix = weighted_information(scaled, updated)
                updated_loss = criterion_loss(criterion, updated_matrix)
                if updated_loss < loss:
                    weights, matrix, loss = updated, updated_matrix, updated_loss
                    profile = derivative_profile(criterion, matrix, scaled)

            weights, matrix, loss = _exchange_step(criterion, scaled, weights, matrix, loss, profile)
            if history is not None:
                history.append(loss)
            if iteration and iteration % 1000 == 0:
                logger.debug(f"Iteration {iteration}: loss {loss:.8g}, max d {profile.max():.3g}")

        return weights, budget


class _Composite:
    """Efficiencies of all maximin objectives over one candidate set, indexed by candidate."""

    def __init__(self, problem: MaximinProblem, points: np.ndarray):
        self.criteria = [objective.criterion for objective in problem.objectives]
        self.scaled = [objective.model.scaled_regressors(points) for objective in problem.objectives]
        self.references = np.asarray(problem.reference_losses, dtype=float)

    def efficiencies_of(self, matrices: list[np.ndarray]) -> np.ndarray:
        losses = np.asarray([criterion_loss(criterion, matrix) for criterion, matrix in zip(self.criteria, matrices)])
        return np.where(np.isinf(losses), 0.0, self.references / losses)

    def matrices(self, weights: np.ndarray) -> list[np.ndarray]:
        return [weighted_information(scaled, weights) for scaled in self.scaled]

    def min_efficiency(self, weights: np.ndarray) -> float:
        return float(self.efficiencies_of(self.matrices(weights)).min())

    def ascent_direction(self, weights: np.ndarray, temperature: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        matrices = self.matrices(weights)
        efficiencies = self.efficiencies_of(matrices)
        mixing = softmax(-efficiencies / temperature)

        combined = np.zeros(self.scaled[0].shape[0])
        for criterion, scaled, matrix, efficiency, share in zip(self.criteria, self.scaled, matrices, efficiencies, mixing):
            if efficiency <= 0:
                continue
            loss = criterion_loss(criterion, matrix)
            scale = derivative_scale(criterion, loss, scaled.shape[1])
            combined += share * efficiency * derivative_profile(criterion, matrix, scaled) / scale
        return efficiencies, combined, mixing

    def step(self, weights: np.ndarray, combined: np.ndarray, temperature: float, smoothed: float) -> Optional[np.ndarray]:
        target = int(np.argmax(combined))
        support = np.flatnonzero(weights > 0)
        source = int(support[np.argmin(combined[support])])

        toward = np.zeros_like(weights)
        toward[target] = 1.0
        moves = [(toward - weights, 1.0)]
        if source != target:
            exchange = np.zeros_like(weights)
            exchange[target], exchange[source] = 1.0, -1.0
            moves.append((exchange, weights[source]))

        matrices = self.matrices(weights)
        best, best_value = None, smoothed
        for direction, limit in moves:
            # Information is linear in the weights, so M(w + s v) = M(w) + s M(v)
            changes = [weighted_information(scaled, direction) for scaled in self.scaled]

            def negated(step: float) -> float:
                moved = [matrix + step * change for matrix, change in zip(matrices, changes)]
                return temperature * logsumexp(-self.efficiencies_of(moved) / temperature)

            result = minimize_scalar(negated, bounds=(0.0, limit), method='bounded')
            for step in (float(result.x), limit):
                value = -negated(step)
                if value > best_value:
                    best, best_value = step * direction, value

        if best is None:
            return None
        moved = np.clip(weights + best, 0.0, None)
        return moved / moved.sum()


def _check_criterion(model: ModelSpec, criterion: Criterion) -> None:
    if not criterion.fits(model.q):
        raise DimensionError(f"Criterion {criterion.label} has {criterion.c_matrix.shape[0]} rows, model {model.name} has {model.q} parameters")


def _certified(profile: np.ndarray, weights: np.ndarray, tolerance: float, settle_support: bool = True) -> bool:
    if profile.max() > tolerance:
        return False
    if not settle_support:
        return True
    return bool(profile[weights > 0].min() >= -SUPPORT_TOLERANCE_FACTOR * tolerance)


def _prune(weights: np.ndarray, threshold: float) -> np.ndarray:
    pruned = np.where(weights >= threshold, weights, 0.0)
    if not np.any(pruned > 0):
        return weights.copy()
    return pruned / pruned.sum()


def _multiplicative_update(criterion: Criterion, weights: np.ndarray, profile: np.ndarray, loss: float, q: int) -> np.ndarray:
    # w_j <- w_j (h_j / q) for D and w_j <- w_j (t_j / loss)^(1/2) for trace-class, where h and t are the
    # derivative profile shifted back by its constant term
    if criterion.is_d:
        updated = weights * np.maximum(profile + q, 0.0) / q
    else:
        updated = weights * np.sqrt(np.maximum(profile + loss, 0.0) / loss)

    updated[updated < CLEANUP_WEIGHT] = 0.0
    return updated / updated.sum()


def _exchange_step(criterion: Criterion, scaled: np.ndarray, weights: np.ndarray, matrix: np.ndarray, loss: float,
                   profile: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    # Moves weight from the worst support point to the best candidate, ties to the lowest index
    target = int(np.argmax(profile))
    support = np.flatnonzero(weights > 0)
    source = int(support[np.argmin(profile[support])])
    if source == target:
        return weights, matrix, loss

    limit = float(weights[source])
    change = np.outer(scaled[target], scaled[target]) - np.outer(scaled[source], scaled[source])

    if criterion.is_d:
        steps = [_d_exchange_step(matrix, scaled[target], scaled[source], limit), limit]
    else:
        result = minimize_scalar(lambda step: criterion_loss(criterion, matrix + step * change), bounds=(0.0, limit), method='bounded')
        steps = [float(result.x), limit]

    best_step, best_loss = 0.0, loss
    for step in steps:
        candidate = criterion_loss(criterion, matrix + step * change)
        if candidate < best_loss:
            best_step, best_loss = step, candidate
    if best_step <= 0.0:
        return weights, matrix, loss

    weights = weights.copy()
    weights[target] += best_step
    weights[source] = 0.0 if best_step >= limit else weights[source] - best_step
    weights /= weights.sum()
    return weights, weighted_information(scaled, weights), best_loss


def _d_exchange_step(matrix: np.ndarray, towards: np.ndarray, away: np.ndarray, limit: float) -> float:
    # det M(a) / det M = 1 + a (h_t - h_a) - a^2 (h_t h_a - h_ta^2), maximized in closed form
    lower = cholesky(matrix)
    if lower is None:
        return 0.0
    solved = cho_solve((lower, True), np.column_stack([towards, away]))
    h_towards = float(towards @ solved[:, 0])
    h_away = float(away @ solved[:, 1])
    h_cross = float(towards @ solved[:, 1])

    curvature = h_towards * h_away - h_cross ** 2
    if curvature <= 0:
        return limit
    return float(np.clip((h_towards - h_away) / (2.0 * curvature), 0.0, limit))
