import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from data.models.criterion import Criterion
from data.models.design import ApproximateDesign, ExactDesign
from data.models.design_space import DesignSpace, SpaceKind
from data.models.maximin_problem import MaximinProblem, Objective
from data.models.model_spec import ModelSpec
from data.models.options import AnnealConfig
from data.models.solve_report import AnnealTrace, RestartReport, SearchReport
from helpers.exceptions import ConfigError, DesignError, InfeasibleDesignError, SingularInformationError
from helpers.information import criterion_loss, weighted_information
from helpers.rounding import round_to_exact, spread_to_exact
from helpers.spaces import contains, neighborhood_half_width, propose_neighbor

logger = logging.getLogger(__name__)

# The settling exit is only considered once the temperature has fallen this far below T0
SETTLE_TEMPERATURE_RATIO = 1e-3


class ExactObjective:
    """
    Loss of an n-run design built from per-run information contributions g(x) g(x)'.

    A single objective gives its criterion loss; several objectives with reference losses give the
    negated minimum efficiency, so that smaller is better in both cases.
    """

    def __init__(self, objectives: Sequence[Objective], references: Optional[Sequence[float]] = None, space: Optional[DesignSpace] = None):
        if references is None and len(objectives) != 1:
            raise ValueError("Several objectives need reference losses")
        self.objectives = list(objectives)
        self.references = None if references is None else np.asarray(references, dtype=float)

        # Finite spaces are small enough to evaluate every contribution once
        self._index: Optional[dict[tuple, int]] = None
        self._tables: list[np.ndarray] = []
        if space is not None and space.kind == SpaceKind.FINITE_SET:
            self._index = {tuple(point): position for position, point in enumerate(space.points)}
            self._tables = [objective.model.scaled_regressors(space.points) for objective in self.objectives]

    @staticmethod
    def single(model: ModelSpec, criterion: Criterion, space: Optional[DesignSpace] = None) -> 'ExactObjective':
        return ExactObjective([Objective(model, criterion)], space=space)

    @staticmethod
    def maximin(problem: MaximinProblem, space: Optional[DesignSpace] = None) -> 'ExactObjective':
        return ExactObjective(problem.objectives, problem.reference_losses, space)

    @property
    def is_maximin(self) -> bool:
        return self.references is not None

    def rows(self, points: np.ndarray) -> list[np.ndarray]:
        if self._index is not None:
            try:
                positions = [self._index[tuple(point)] for point in points]
            except KeyError as error:
                raise ConfigError(f"Point {list(error.args[0])} is not a member of the design space") from error
            return [table[positions] for table in self._tables]
        return [objective.model.scaled_regressors(points) for objective in self.objectives]

    def matrices(self, rows: list[np.ndarray]) -> list[np.ndarray]:
        count = rows[0].shape[0]
        return [weighted_information(scaled, np.full(count, 1.0 / count)) for scaled in rows]

    def loss_of(self, matrices: list[np.ndarray]) -> float:
        losses = [criterion_loss(objective.criterion, matrix) for objective, matrix in zip(self.objectives, matrices)]
        if not self.is_maximin:
            return losses[0]
        if any(math.isinf(loss) for loss in losses):
            return math.inf
        return -float(np.min(self.references / np.asarray(losses)))

    def __call__(self, design) -> float:
        runs = design.runs if isinstance(design, ExactDesign) else np.asarray(design, dtype=float)
        return self.loss_of(self.matrices(self.rows(runs)))


def anneal_once(objective: ExactObjective, init: ExactDesign, space: DesignSpace, cfg: AnnealConfig,
                rng: np.random.Generator) -> tuple[ExactDesign, AnnealTrace, dict]:
    runs = init.runs.astype(float)
    n = runs.shape[0]
    if not all(contains(space, point) for point in init.points):
        raise ConfigError("The initial design has points outside the design space")

    rows = objective.rows(runs)
    matrices = objective.matrices(rows)
    loss = objective.loss_of(matrices)
    if math.isinf(loss):
        raise SingularInformationError("The initial design has a singular information matrix")

    t0, t_min, k = cfg.resolve(loss, n)
    initial_loss = loss
    temperature = t0
    # Last two accepted losses; the first is unset until something is accepted
    previous, latest = math.inf, loss
    best = loss

    iterations, temperatures, proposed, accepted_flags, bests = [], [], [], [], []
    iteration = 0
    accepted_count = 0
    levels = 0
    while temperature > t_min:
        half_width = neighborhood_half_width(space, temperature / t0)
        for _ in range(k):
            iteration += 1
            run = int(rng.integers(n))
            proposal = propose_neighbor(space, runs[run], half_width, rng)
            new_rows = objective.rows(proposal.reshape(1, -1))
            # Moving one run changes the information by (g(x') g(x')' - g(x) g(x)') / n
            new_matrices = [
                matrix + (np.outer(new[0], new[0]) - np.outer(old[run], old[run])) / n
                for matrix, new, old in zip(matrices, new_rows, rows)
            ]
            new_loss = objective.loss_of(new_matrices)

            change = new_loss - loss
            threshold = rng.random()
            accepted = not math.isinf(new_loss) and (change <= 0 or math.exp(-change / temperature) > threshold)
            if accepted:
                runs[run] = proposal
                for current, new in zip(rows, new_rows):
                    current[run] = new[0]
                matrices = new_matrices
                loss = new_loss
                previous, latest = latest, new_loss
                best = min(best, new_loss)
                accepted_count += 1

            iterations.append(iteration)
            temperatures.append(temperature)
            proposed.append(new_loss)
            accepted_flags.append(accepted)
            bests.append(best)

        # Rank-one updates drift, so the matrices are rebuilt once per temperature level
        matrices = objective.matrices(rows)
        loss = objective.loss_of(matrices)
        level_temperature = temperature
        temperature *= cfg.alpha
        levels += 1
        # Only cold levels may settle
        if level_temperature <= SETTLE_TEMPERATURE_RATIO * t0 and abs(latest - previous) <= cfg.delta:
            logger.debug(f"Accepted losses settled after {levels} temperature levels")
            break

    trace = AnnealTrace(
        iteration=np.asarray(iterations, dtype=np.int64),
        temperature=np.asarray(temperatures, dtype=float),
        proposed_loss=np.asarray(proposed, dtype=float),
        accepted=np.asarray(accepted_flags, dtype=bool),
        best_loss=np.asarray(bests, dtype=float),
    )
    stats = {
        'initial_loss': initial_loss,
        'final_loss': loss,
        'iterations': iteration,
        'accepted': accepted_count,
        'temperatures': (t0, t_min, k),
    }
    return ExactDesign(runs, np.ones(n, dtype=np.int64)), trace, stats


class Annealer:
    def __init__(self, config: AnnealConfig, workers: Optional[int] = None):
        self.config = config
        self.workers = workers or os.cpu_count() or 1
        # T0, T_min and K of every finished search, in order
        self.resolved_temperatures: list[tuple[float, float, int]] = []

    def search(self, model: ModelSpec, criterion: Criterion, approx_ref: ApproximateDesign, n: int,
               space: DesignSpace) -> tuple[ExactDesign, SearchReport]:
        objective = ExactObjective.single(model, criterion, space)
        reference = criterion_loss(criterion, weighted_information(model.scaled_regressors(approx_ref.points), approx_ref.weights))
        if math.isinf(reference):
            raise InfeasibleDesignError("The reference approximate design has a singular information matrix")

        return self._search(objective, approx_ref, n, space, lambda loss: reference / loss, reference)

    def search_maximin(self, problem: MaximinProblem, approx_ref: ApproximateDesign, n: int,
                       space: DesignSpace) -> tuple[ExactDesign, SearchReport]:
        objective = ExactObjective.maximin(problem, space)
        # The approximate maximin design is the benchmark for the minimum efficiency
        matrices = [
            weighted_information(item.model.scaled_regressors(approx_ref.points), approx_ref.weights)
            for item in problem.objectives
        ]
        reference = objective.loss_of(matrices)
        if math.isinf(reference):
            raise InfeasibleDesignError("The reference approximate design has a singular information matrix")

        return self._search(objective, approx_ref, n, space, lambda loss: loss / reference, reference)

    def _search(self, objective: ExactObjective, approx_ref: ApproximateDesign, n: int, space: DesignSpace,
                scorer, reference: float) -> tuple[ExactDesign, SearchReport]:
        init = self._initial_design(objective, approx_ref, n, space)
        config = self.config

        def restart(index: int) -> RestartReport:
            rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(index,)))
            try:
                design, trace, stats = anneal_once(objective, init, space, config, rng)
            except DesignError as error:
                logger.warning(f"Restart {index} aborted: {error}")
                return RestartReport(index, math.inf, math.inf, 0.0, 0, 0, diagnostic=str(error))

            score = scorer(stats['final_loss']) if not math.isinf(stats['final_loss']) else 0.0
            logger.info(f"Restart {index}: loss {stats['final_loss']:.6g}, modified efficiency {score:.4f} after {stats['iterations']} iterations")
            return RestartReport(
                restart=index,
                initial_loss=stats['initial_loss'],
                final_loss=stats['final_loss'],
                modified_efficiency=score,
                iterations=stats['iterations'],
                accepted=stats['accepted'],
                design=design,
                trace=trace,
                temperatures=stats['temperatures'],
                highly_efficient=score >= config.target_efficiency,
            )

        with ThreadPoolExecutor(max_workers=min(self.workers, config.restarts)) as executor:
            reports = list(executor.map(restart, range(config.restarts)))

        best = None
        for report in reports:
            if report.aborted:
                continue
            # Strictly greater keeps the lowest restart index among ties
            if best is None or report.modified_efficiency > reports[best].modified_efficiency:
                best = report.restart

        if best is None:
            diagnostics = '; '.join(f"restart {report.restart}: {report.diagnostic}" for report in reports)
            raise InfeasibleDesignError(f"All {len(reports)} annealing restarts aborted ({diagnostics})")

        self.resolved_temperatures.append(reports[best].temperatures)
        search_report = SearchReport(best, reports, reference, config.target_efficiency)
        if not search_report.target_reached:
            logger.warning(f"No restart reached the target efficiency {config.target_efficiency}")
        return reports[best].design, search_report

    @staticmethod
    def _initial_design(objective: ExactObjective, approx_ref: ApproximateDesign, n: int, space: DesignSpace) -> ExactDesign:
        init = round_to_exact(approx_ref, n)
        if not all(contains(space, point) for point in init.points) or not math.isinf(objective(init)):
            return init

        # Rounding dropped too many support points to identify the model
        spread = spread_to_exact(approx_ref, n)
        logger.info(f"Rounding kept {init.size} points and a singular information matrix; starting from {spread.size} points instead")
        return spread
