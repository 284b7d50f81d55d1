from dataclasses import dataclass

from data.models.criterion import Criterion
from data.models.model_spec import ModelSpec


@dataclass(frozen=True, eq=False)
class Objective:
    model: ModelSpec
    criterion: Criterion

    def to_json(self) -> dict:
        return {
            'model': self.model.to_json(),
            'criterion': self.criterion.to_json(),
        }


@dataclass(frozen=True, eq=False)
class MaximinProblem:
    objectives: tuple[Objective, ...]
    reference_losses: tuple[float, ...]

    def __post_init__(self):
        if len(self.objectives) < 2:
            raise ValueError("A maximin problem needs at least two objectives")
        if len(self.objectives) != len(self.reference_losses):
            raise ValueError("Every objective needs exactly one reference loss")
        if any(loss <= 0 for loss in self.reference_losses):
            raise ValueError("Reference losses must be positive")

    @property
    def size(self) -> int:
        return len(self.objectives)

    def to_json(self) -> dict:
        return {
            'objectives': [objective.to_json() for objective in self.objectives],
            'reference_losses': list(self.reference_losses),
        }
