import math
from typing import Optional, Union

import numpy as np
from scipy.linalg import solve_triangular

from data.models.criterion import Criterion
from data.models.design import ApproximateDesign, ExactDesign
from data.models.model_spec import ModelSpec
from helpers.exceptions import SingularInformationError, DimensionError

RCOND_LIMIT = 1e-12

AnyDesign = Union[ApproximateDesign, ExactDesign]


def info_matrix(model: ModelSpec, design: AnyDesign) -> np.ndarray:
    if design.p != model.p:
        raise DimensionError(f"Model {model.name} has dimension {model.p}, the design has {design.p}")
    return weighted_information(model.scaled_regressors(design.points), design.weights)


def weighted_information(scaled: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # sum_i w_i g_i g_i^T with g_i = sqrt(lambda_i) f_i
    matrix = (scaled * weights[:, np.newaxis]).T @ scaled
    return (matrix + matrix.T) / 2.0


def cholesky(matrix: np.ndarray) -> Optional[np.ndarray]:
    try:
        lower = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        return None

    diagonal = np.diag(lower)
    if not np.all(np.isfinite(diagonal)) or diagonal.min() <= 0:
        return None
    # Squared ratio of the Cholesky diagonal estimates the reciprocal condition number
    if (diagonal.min() / diagonal.max()) ** 2 < RCOND_LIMIT:
        return None
    return lower


def criterion_loss(criterion: Criterion, matrix: np.ndarray) -> float:
    lower = cholesky(matrix)
    if lower is None:
        return math.inf
    return loss_from_cholesky(criterion, lower)


def loss_from_cholesky(criterion: Criterion, lower: np.ndarray) -> float:
    q = lower.shape[0]
    if criterion.is_d:
        # (det M^-1)^(1/q) = exp(-logdet(M) / q)
        logdet = 2.0 * np.log(np.diag(lower)).sum()
        return float(np.exp(-logdet / q))

    solved = solve_triangular(lower, criterion.c_matrix, lower=True, check_finite=False)
    return float(np.sum(solved ** 2))


def design_loss(model: ModelSpec, criterion: Criterion, design: AnyDesign) -> float:
    return criterion_loss(criterion, info_matrix(model, design))


def derivative_profile(criterion: Criterion, matrix: np.ndarray, scaled: np.ndarray) -> np.ndarray:
    """
    Directional derivatives d(x) of the criterion at every row g(x) of `scaled`.

    D: g' M^-1 g - q
    trace-class: g' M^-1 C C' M^-1 g - tr(C' M^-1 C)
    Nonpositive everywhere exactly when the design is optimal over those points.
    """
    lower = cholesky(matrix)
    if lower is None:
        raise SingularInformationError("The information matrix is singular, so the equivalence check is undefined")

    q = lower.shape[0]
    if criterion.is_d:
        solved = solve_triangular(lower, scaled.T, lower=True, check_finite=False)
        return np.sum(solved ** 2, axis=0) - q

    inverse_c = _inverse_times(lower, criterion.c_matrix)
    projected = scaled @ inverse_c
    trace = float(np.sum(criterion.c_matrix * inverse_c))
    return np.sum(projected ** 2, axis=1) - trace


def directional_derivative(criterion: Criterion, model: ModelSpec, design: ApproximateDesign, x) -> float:
    matrix = info_matrix(model, design)
    scaled = model.scaled_regressors(np.asarray(x, dtype=float).reshape(1, -1))
    return float(derivative_profile(criterion, matrix, scaled)[0])


def derivative_scale(criterion: Criterion, loss: float, q: int) -> float:
    # Moving weight towards x changes the efficiency at rate Eff * d(x) / scale
    return q if criterion.is_d else loss


def _inverse_times(lower: np.ndarray, right: np.ndarray) -> np.ndarray:
    half = solve_triangular(lower, right, lower=True, check_finite=False)
    return solve_triangular(lower.T, half, lower=False, check_finite=False)
