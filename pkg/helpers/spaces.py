import numpy as np

from data.models.design import ApproximateDesign
from data.models.design_space import DesignSpace, SpaceKind
from helpers.exceptions import DimensionError, ConfigError

DEFAULT_HALF_WIDTH = 0.05
MIN_HALF_WIDTH = 0.005
# Share of integer-run proposals that relocate the run to any other member instead of a unit step
RELOCATION_SHARE = 0.5


def grid_levels(space: DesignSpace, dimension: int) -> np.ndarray:
    # low + range * (i / (k - 1)) keeps the levels of nested grids bit-identical, unlike linspace
    count = space.levels[dimension]
    low, high = space.low[dimension], space.high[dimension]
    levels = low + (high - low) * (np.arange(count) / (count - 1))
    levels[-1] = high
    return levels


def enumerate_grid(space: DesignSpace) -> np.ndarray:
    if space.kind == SpaceKind.FINITE_SET:
        return space.points.copy()
    if space.kind == SpaceKind.BOX:
        raise ConfigError("A continuous box has no finite candidate set; declare it as a grid to discretize it")

    axes = [grid_levels(space, dimension) for dimension in range(space.p)]
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack([axis.reshape(-1) for axis in mesh], axis=1)


def contains(space: DesignSpace, x) -> bool:
    point = _as_point(space, x)
    if space.kind == SpaceKind.FINITE_SET:
        return bool(np.any(np.all(space.points == point, axis=1)))
    return bool(np.all(point >= np.asarray(space.low)) and np.all(point <= np.asarray(space.high)))


def neighborhood_half_width(space: DesignSpace, temperature_ratio: float = 1.0) -> np.ndarray:
    # 5% of each range at the start, shrinking with the temperature down to 0.5%
    return space.ranges * max(DEFAULT_HALF_WIDTH * temperature_ratio, MIN_HALF_WIDTH)


def propose_neighbor(space: DesignSpace, x, scale, rng: np.random.Generator) -> np.ndarray:
    point = _as_point(space, x)

    if space.kind == SpaceKind.FINITE_SET:
        if space.points.shape[0] == 1:
            return point
        if space.is_integer_lattice and rng.random() >= RELOCATION_SHARE:
            return _integer_step(space, point, rng)
        return _other_member(space, point, rng)

    scale = np.broadcast_to(np.asarray(scale, dtype=float), point.shape)
    moved = point + rng.uniform(-1.0, 1.0, size=point.shape) * scale
    return np.clip(moved, space.low, space.high)


def snap_to_grid(space: DesignSpace, design: ApproximateDesign) -> ApproximateDesign:
    if space.kind != SpaceKind.GRID:
        raise ConfigError("Only grid spaces can snap a design onto their points")
    if design.p != space.p:
        raise DimensionError(f"The design has dimension {design.p}, the grid has {space.p}")

    snapped = np.empty_like(design.points)
    for dimension in range(space.p):
        levels = grid_levels(space, dimension)
        low, high, count = space.low[dimension], space.high[dimension], space.levels[dimension]
        index = np.rint((design.points[:, dimension] - low) / (high - low) * (count - 1))
        snapped[:, dimension] = levels[np.clip(index, 0, count - 1).astype(int)]

    return ApproximateDesign(snapped, design.weights)


def _integer_step(space: DesignSpace, point: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    low, high = space.low[0], space.high[0]
    step = 1.0 if rng.random() < 0.5 else -1.0
    value = point[0] + step
    # Reflect at the ends so the only legal move is taken
    if value > high:
        value = point[0] - 1.0
    elif value < low:
        value = point[0] + 1.0
    return np.asarray([value])


def _other_member(space: DesignSpace, point: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    others = np.flatnonzero(~np.all(space.points == point, axis=1))
    return space.points[others[rng.integers(others.size)]].copy()


def _as_point(space: DesignSpace, x) -> np.ndarray:
    point = np.asarray(x, dtype=float).reshape(-1)
    if point.size != space.p:
        raise DimensionError(f"The design space has dimension {space.p}, got a point of dimension {point.size}")
    return point
