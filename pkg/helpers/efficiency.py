import math
from typing import Iterable, Union

import numpy as np

from data.models.criterion import Criterion
from data.models.design import ApproximateDesign, ExactDesign
from data.models.model_spec import ModelSpec
from helpers.exceptions import SingularInformationError
from helpers.information import design_loss

AnyDesign = Union[ApproximateDesign, ExactDesign]


def efficiency(criterion: Criterion, model: ModelSpec, design: AnyDesign, reference_loss: float) -> float:
    # With the D loss kept on the det^(1/q) scale this ratio is already the usual D-efficiency
    if reference_loss <= 0:
        raise ValueError("The reference loss must be positive")
    loss = design_loss(model, criterion, design)
    return 0.0 if math.isinf(loss) else reference_loss / loss


def modified_efficiency(criterion: Criterion, model: ModelSpec, exact: ExactDesign, approx_ref: ApproximateDesign) -> float:
    reference_loss = design_loss(model, criterion, approx_ref)
    exact_loss = design_loss(model, criterion, exact)
    if math.isinf(reference_loss) or math.isinf(exact_loss):
        raise SingularInformationError("Both designs need an invertible information matrix to compare them")
    return reference_loss / exact_loss


def min_efficiency(designs_losses: Iterable[tuple[float, float]]) -> float:
    pairs = list(designs_losses)
    if not pairs:
        raise ValueError("At least one (loss, reference loss) pair is needed")
    if any(reference <= 0 for _, reference in pairs):
        raise ValueError("Reference losses must be positive")
    return min(0.0 if math.isinf(loss) else reference / loss for loss, reference in pairs)


def decompose_efficiency(grid_efficiency: float, modified: float) -> float:
    # Eff(exact) = Eff(grid optimum) * Eff~(exact)
    return grid_efficiency * modified


def design_cdf(design: AnyDesign) -> np.ndarray:
    if design.p != 1:
        raise ValueError("Distribution functions are only defined for one-dimensional designs")
    order = np.argsort(design.points[:, 0])
    return np.column_stack([design.points[order, 0], np.cumsum(design.weights[order])])
