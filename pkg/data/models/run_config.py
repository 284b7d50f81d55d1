import logging
from copy import deepcopy
from dataclasses import dataclass, field, replace
from enum import Enum, unique
from typing import Optional

from data.models.criterion import Criterion
from data.models.design_space import DesignSpace
from data.models.maximin_problem import Objective
from data.models.model_spec import ModelSpec
from data.models.options import ApproxSolveOptions, AnnealConfig, DEFAULT_SEED
from helpers.exceptions import ConfigError, PresetError
from helpers.model_registry import make_preset

logger = logging.getLogger(__name__)


@unique
class Task(Enum):
    APPROX = "approx"
    EXACT = "exact"
    MAXIMIN_APPROX = "maximin_approx"
    MAXIMIN_EXACT = "maximin_exact"
    VERIFY = "verify"
    PRESET = "preset"

    @property
    def needs_n(self) -> bool:
        return self in (Task.EXACT, Task.MAXIMIN_EXACT)

    @property
    def is_maximin(self) -> bool:
        return self in (Task.MAXIMIN_APPROX, Task.MAXIMIN_EXACT)


@unique
class ExactMethod(Enum):
    ANNEAL = "anneal"
    ROUNDING = "rounding"


@dataclass(frozen=True, eq=False)
class RunConfig:
    task: Task
    output: str = 'results'
    seed: int = DEFAULT_SEED
    model: Optional[ModelSpec] = None
    space: Optional[DesignSpace] = None
    criterion: Optional[Criterion] = None
    objectives: tuple[Objective, ...] = ()
    n: Optional[int] = None
    approx: ApproxSolveOptions = field(default_factory=ApproxSolveOptions)
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    method: ExactMethod = ExactMethod.ANNEAL
    reference_design: Optional[str] = None
    design: Optional[str] = None
    application: Optional[str] = None
    n_values: tuple[int, ...] = ()
    theta_stars: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.task.needs_n and (self.n is None or self.n < 1):
            raise ConfigError(f"Task {self.task.value} needs a run count n >= 1")
        if self.task == Task.PRESET:
            if not self.application:
                raise ConfigError("Task preset needs an application id")
            return

        if self.space is None:
            raise ConfigError(f"Task {self.task.value} needs a design space")
        if self.task.is_maximin:
            if len(self.objectives) < 2:
                raise ConfigError("Maximin tasks need at least two objectives")
            if any(objective.model.p != self.space.p for objective in self.objectives):
                raise ConfigError("Every maximin objective must match the dimension of the design space")
            if not all(objective.criterion.fits(objective.model.q) for objective in self.objectives):
                raise ConfigError("Every maximin criterion must have one row per model parameter")
            return

        if self.model is None or self.criterion is None:
            raise ConfigError(f"Task {self.task.value} needs a model and a criterion")
        if self.model.p != self.space.p:
            raise ConfigError(f"Model {self.model.name} has dimension {self.model.p}, the design space has {self.space.p}")
        if not self.criterion.fits(self.model.q):
            raise ConfigError(f"Criterion {self.criterion.label} needs {self.model.q} rows to match model {self.model.name}")
        if self.task == Task.VERIFY and not self.design:
            raise ConfigError("Task verify needs a design file")

    @staticmethod
    def from_json(data: dict, task: Optional[Task] = None) -> 'RunConfig':
        try:
            task = task or Task(data['task'])
            seed = int(data.get('seed', data.get('anneal', {}).get('seed', DEFAULT_SEED)))
            if 'seed' not in data:
                logger.info(f"No seed configured, using the default {seed}")

            model = _model_from_json(data['model']) if 'model' in data else None
            criterion = Criterion.from_json(data['criterion'], model.q) if model is not None and 'criterion' in data else None
            objectives = tuple(
                _objective_from_json(item)
                for item in data.get('objectives', [])
            )

            return RunConfig(
                task=task,
                output=str(data.get('output', 'results')),
                seed=seed,
                model=model,
                space=DesignSpace.from_json(data['space']) if 'space' in data else None,
                criterion=criterion,
                objectives=objectives,
                n=int(data['n']) if data.get('n') is not None else None,
                approx=ApproxSolveOptions.from_json(data.get('approx', {})),
                anneal=AnnealConfig.from_json({**data.get('anneal', {}), 'seed': seed}),
                method=ExactMethod(data.get('exact', {}).get('method', ExactMethod.ANNEAL.value)),
                reference_design=data.get('reference_design'),
                design=data.get('design'),
                application=data.get('application'),
                n_values=tuple(int(value) for value in data.get('n_values', [])),
                theta_stars=tuple(tuple(float(value) for value in theta) for theta in data.get('theta_stars', [])),
            )
        except (ConfigError, PresetError):
            raise
        except (KeyError, TypeError, ValueError) as error:
            raise ConfigError(f"Invalid run configuration: {error!r}") from error

    def to_json(self, resolved: Optional[dict] = None) -> dict:
        # Solver defaults left open in the file are echoed with the values the run resolved
        resolved = resolved or {}
        data = {
            'task': self.task.value,
            'output': self.output,
            'seed': self.seed,
            'approx': {**self.approx.to_json(), **resolved.get('approx', {})},
            'anneal': {**self.anneal.to_json(), **resolved.get('anneal', {})},
        }
        if self.model is not None:
            data['model'] = self.model.to_json()
        if self.space is not None:
            data['space'] = self.space.to_json()
        if self.criterion is not None:
            data['criterion'] = self.criterion.to_json()
        if self.objectives:
            data['objectives'] = [objective.to_json() for objective in self.objectives]
        if self.n is not None:
            data['n'] = self.n
        if self.task.needs_n:
            data['exact'] = {'method': self.method.value}
        if self.reference_design:
            data['reference_design'] = self.reference_design
        if self.design:
            data['design'] = self.design
        if self.application:
            data['application'] = self.application
            data['n_values'] = list(self.n_values)
            data['theta_stars'] = [list(theta) for theta in self.theta_stars]
        return data

    def copy(self, **changes) -> 'RunConfig':
        return replace(deepcopy(self), **changes)


def _model_from_json(data: dict) -> ModelSpec:
    return make_preset(data['preset'], data['theta_star'])


def _objective_from_json(data: dict) -> Objective:
    model = _model_from_json(data['model'])
    return Objective(model, Criterion.from_json(data.get('criterion', {}), model.q))
