import logging

import numpy as np

from data.models.design import ApproximateDesign, ExactDesign
from helpers.exceptions import InfeasibleDesignError

logger = logging.getLogger(__name__)


def round_to_exact(approx: ApproximateDesign, n: int) -> ExactDesign:
    """
    Largest-remainder apportionment of n runs over the support of `approx`.

    Every count is the floor or the ceiling of n * w_i and the counts sum to n. With more support
    points than runs, the n heaviest points get one run each. Ties go to the lowest point index.
    """
    if n < 1:
        raise ValueError("An exact design needs at least one run")

    weights = approx.weights
    if approx.size > n:
        # Stable sort on the negated weights keeps the lowest index first among equal weights
        chosen = np.sort(np.argsort(-weights, kind='stable')[:n])
        return ExactDesign(approx.points[chosen], np.ones(n, dtype=np.int64))

    return ExactDesign(approx.points, _apportion(weights, n))


def spread_to_exact(approx: ApproximateDesign, n: int) -> ExactDesign:
    """
    Apportionment that keeps min(m, n) distinct points: the heaviest points get one run each first, and
    the remaining runs follow the weight left over after that run, by largest remainder.
    """
    if n < 1:
        raise ValueError("An exact design needs at least one run")

    kept = min(approx.size, n)
    chosen = np.sort(np.argsort(-approx.weights, kind='stable')[:kept])
    counts = np.ones(kept, dtype=np.int64)

    spare = n - kept
    if spare:
        residual = np.clip(n * approx.weights[chosen] - 1.0, 0.0, None)
        if residual.sum() <= 0:
            residual = approx.weights[chosen]
        counts += _apportion(residual / residual.sum(), spare)
    return ExactDesign(approx.points[chosen], counts)


def theorem1_construction(approx: ApproximateDesign, n: int) -> ExactDesign:
    # Keeps the full support, which needs at least one run per point
    scaled = n * approx.weights
    if np.any(scaled < 1.0 - 1e-12):
        smallest = float(approx.weights.min())
        raise InfeasibleDesignError(
            f"n={n} is too small to keep every support point (smallest weight {smallest:.4g} needs n >= {int(np.ceil(1.0 / smallest))}); use the annealing search instead"
        )

    counts = _apportion(approx.weights, n)
    # n * w_i >= 1 guarantees a floor of at least 1, so no support point is lost
    logger.debug(f"Rounded {approx.size} support points to counts {counts.tolist()}")
    return ExactDesign(approx.points, counts)


def _apportion(weights: np.ndarray, n: int) -> np.ndarray:
    quotas = n * weights
    counts = np.floor(quotas + 1e-12).astype(np.int64)
    shortfall = n - int(counts.sum())

    remainders = quotas - counts
    if shortfall >= 0:
        order = np.argsort(-remainders, kind='stable')
        counts[order[:shortfall]] += 1
    else:
        # Only reachable through floating point noise in the quotas
        order = [index for index in np.argsort(remainders, kind='stable') if counts[index] > 0]
        counts[order[:-shortfall]] -= 1
    return counts
