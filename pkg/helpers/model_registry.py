import logging
from enum import Enum, unique
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import expit

from data.models.model_spec import ModelSpec
from helpers.exceptions import PresetError, DegenerateProbabilityError, DimensionError

logger = logging.getLogger(__name__)


@unique
class PresetId(Enum):
    LOGIT2_INTERACTION = "logit2_interaction"
    GROUP_TESTING = "group_testing"
    LOGIT7 = "logit7"
    DOSE_LINEAR = "dose_linear"
    DOSE_EMAX = "dose_emax"
    DOSE_LOGISTIC = "dose_logistic"
    POLY_LINEAR = "poly_linear"

    @staticmethod
    def parse(raw: Union[str, 'PresetId']) -> 'PresetId':
        if isinstance(raw, PresetId):
            return raw
        try:
            return PresetId(str(raw).strip().lower())
        except ValueError as error:
            known = ', '.join(preset.value for preset in PresetId)
            raise PresetError(f"Unknown model preset '{raw}'; known presets are: {known}") from error


def eval_regressor(model: ModelSpec, x) -> np.ndarray:
    return model.regressors(_single_point(model, x))[0]


def eval_info_weight(model: ModelSpec, x) -> float:
    return float(model.weights(_single_point(model, x))[0])


def _single_point(model: ModelSpec, x) -> np.ndarray:
    point = np.asarray(x, dtype=float).reshape(-1)
    if point.size != model.p:
        raise DimensionError(f"Model {model.name} expects a point of dimension {model.p}, got {point.size}")
    return point.reshape(1, -1)


def make_preset(preset_id: Union[str, PresetId], theta_star: Sequence[float]) -> ModelSpec:
    preset = PresetId.parse(preset_id)
    theta = tuple(float(value) for value in theta_star)

    builder, expected_q = _BUILDERS[preset]
    if expected_q is not None and len(theta) != expected_q:
        raise PresetError(f"Preset {preset.value} needs a parameter vector of length {expected_q}, got {len(theta)}")

    model = builder(theta)
    logger.debug(f"Built model {model.name} with p={model.p}, q={model.q}")
    return model


# ---------------------------------------------------------------------------
# Information weights

def _unit_weight(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return np.ones(points.shape[0])


def _logistic_weight(regressor: Callable) -> Callable:
    # lambda = e^eta / (1 + e^eta)^2 = s (1 - s) with s the logistic function of the linear predictor
    def weight(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
        eta = regressor(points, theta) @ theta
        s = expit(eta)
        return s * (1.0 - s)
    return weight


# ---------------------------------------------------------------------------
# Regressors

def _logit2_regressor(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    x1, x2 = points[:, 0], points[:, 1]
    return np.column_stack([np.ones_like(x1), x1, x2, x1 * x2])


def _intercept_regressor(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(points.shape[0]), points])


def _group_testing_probability(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    p0, p1, p2 = theta
    return p1 - (p1 + p2 - 1.0) * (1.0 - p0) ** points[:, 0]


def _group_testing_regressor(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    p0, p1, p2 = theta
    x = points[:, 0]
    survival = (1.0 - p0) ** x
    return np.column_stack([
        x * (p1 + p2 - 1.0) * (1.0 - p0) ** (x - 1.0),
        1.0 - survival,
        -survival,
    ])


def _group_testing_weight(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    pi = _group_testing_probability(points, theta)
    if np.any(pi <= 0.0) or np.any(pi >= 1.0):
        raise DegenerateProbabilityError("The positive-test probability must lie strictly inside (0, 1)")
    return 1.0 / (pi * (1.0 - pi))


def _emax_regressor(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    # eta = t0 + t1 x / (t2 + x)
    _, t1, t2 = theta
    x = points[:, 0]
    ratio = x / (t2 + x)
    return np.column_stack([np.ones_like(x), ratio, -t1 * x / (t2 + x) ** 2])


def _dose_logistic_regressor(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    # eta = t0 + t1 / (1 + exp((t2 - x) / t3))
    _, t1, t2, t3 = theta
    x = points[:, 0]
    s = expit((x - t2) / t3)
    slope = s * (1.0 - s)
    return np.column_stack([
        np.ones_like(x),
        s,
        -t1 * slope / t3,
        t1 * slope * (t2 - x) / t3 ** 2,
    ])


def _polynomial_regressor(degree: int) -> Callable:
    def regressor(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return np.vander(points[:, 0], degree + 1, increasing=True)
    return regressor


# ---------------------------------------------------------------------------
# Builders

def _build_logit2(theta: tuple) -> ModelSpec:
    return ModelSpec(PresetId.LOGIT2_INTERACTION.value, 2, 4, theta, _logit2_regressor, _logistic_weight(_logit2_regressor))


def _build_group_testing(theta: tuple) -> ModelSpec:
    p0, p1, p2 = theta
    if not 0.0 < p0 < 1.0:
        raise PresetError("The prevalence p0 must lie strictly inside (0, 1)")
    if p1 + p2 <= 1.0:
        logger.warning("Sensitivity plus specificity is not above 1; the test carries no information about prevalence")
    return ModelSpec(PresetId.GROUP_TESTING.value, 1, 3, theta, _group_testing_regressor, _group_testing_weight)


def _build_logit7(theta: tuple) -> ModelSpec:
    return ModelSpec(PresetId.LOGIT7.value, 7, 8, theta, _intercept_regressor, _logistic_weight(_intercept_regressor))


def _build_dose_linear(theta: tuple) -> ModelSpec:
    return ModelSpec(PresetId.DOSE_LINEAR.value, 1, 2, theta, _intercept_regressor, _unit_weight)


def _build_dose_emax(theta: tuple) -> ModelSpec:
    return ModelSpec(PresetId.DOSE_EMAX.value, 1, 3, theta, _emax_regressor, _unit_weight)


def _build_dose_logistic(theta: tuple) -> ModelSpec:
    if theta[3] == 0:
        raise PresetError("The logistic dose-response scale parameter must be nonzero")
    return ModelSpec(PresetId.DOSE_LOGISTIC.value, 1, 4, theta, _dose_logistic_regressor, _unit_weight)


def _build_poly_linear(theta: tuple) -> ModelSpec:
    # The length of the parameter vector fixes the polynomial degree; the model is linear so the values are not used
    if len(theta) < 2:
        raise PresetError("Preset poly_linear needs at least 2 parameters (intercept and slope)")
    degree = len(theta) - 1
    return ModelSpec(PresetId.POLY_LINEAR.value, 1, degree + 1, theta, _polynomial_regressor(degree), _unit_weight)


_BUILDERS: dict[PresetId, tuple[Callable[[tuple], ModelSpec], int]] = {
    PresetId.LOGIT2_INTERACTION: (_build_logit2, 4),
    PresetId.GROUP_TESTING: (_build_group_testing, 3),
    PresetId.LOGIT7: (_build_logit7, 8),
    PresetId.DOSE_LINEAR: (_build_dose_linear, 2),
    PresetId.DOSE_EMAX: (_build_dose_emax, 3),
    PresetId.DOSE_LOGISTIC: (_build_dose_logistic, 4),
    PresetId.POLY_LINEAR: (_build_poly_linear, None),
}
