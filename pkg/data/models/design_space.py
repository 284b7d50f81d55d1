from copy import deepcopy
from dataclasses import dataclass, replace, field
from enum import Enum, unique
from typing import Optional

import numpy as np


@unique
class SpaceKind(Enum):
    BOX = "box"
    GRID = "grid"
    FINITE_SET = "finite_set"


@dataclass(frozen=True, eq=False)
class DesignSpace:
    kind: SpaceKind
    low: tuple[float, ...] = ()
    high: tuple[float, ...] = ()
    levels: tuple[int, ...] = ()
    points: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == SpaceKind.FINITE_SET:
            self._init_finite_set()
            return

        low = tuple(float(value) for value in self.low)
        high = tuple(float(value) for value in self.high)
        if not low or len(low) != len(high):
            raise ValueError("A box needs one lower and one upper bound per dimension")
        if any(lo >= hi for lo, hi in zip(low, high)):
            raise ValueError("Every lower bound must be strictly below its upper bound")

        levels = tuple(int(level) for level in self.levels)
        if self.kind == SpaceKind.GRID:
            if len(levels) == 1 and len(low) > 1:
                levels = levels * len(low)
            if len(levels) != len(low):
                raise ValueError("A grid needs one level count per dimension")
            if any(level < 2 for level in levels):
                raise ValueError("A grid needs at least 2 levels per dimension")

        # Workaround to initialize a field in a frozen class
        super().__setattr__('low', low)
        super().__setattr__('high', high)
        super().__setattr__('levels', levels)

    def _init_finite_set(self) -> None:
        if self.points is None:
            raise ValueError("A finite design space needs a list of points")
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.shape[0] == 0:
            raise ValueError("A finite design space cannot be empty")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise ValueError("A finite design space cannot contain duplicate points")

        super().__setattr__('points', points)
        super().__setattr__('low', tuple(points.min(axis=0)))
        super().__setattr__('high', tuple(points.max(axis=0)))

    @property
    def p(self) -> int:
        return len(self.low)

    @property
    def is_discrete(self) -> bool:
        return self.kind != SpaceKind.BOX

    @property
    def size(self) -> Optional[int]:
        if self.kind == SpaceKind.FINITE_SET:
            return self.points.shape[0]
        if self.kind == SpaceKind.GRID:
            return int(np.prod(self.levels))
        return None

    @property
    def ranges(self) -> np.ndarray:
        return np.asarray(self.high) - np.asarray(self.low)

    @property
    def is_integer_lattice(self) -> bool:
        # One-dimensional runs of consecutive integers take +1/-1 moves
        if self.kind != SpaceKind.FINITE_SET or self.p != 1:
            return False
        values = self.points[:, 0]
        if not np.all(np.equal(np.mod(values, 1), 0)):
            return False
        return values.max() - values.min() + 1 == values.size

    @staticmethod
    def box(low, high) -> 'DesignSpace':
        return DesignSpace(SpaceKind.BOX, tuple(np.atleast_1d(low)), tuple(np.atleast_1d(high)))

    @staticmethod
    def grid(low, high, levels) -> 'DesignSpace':
        return DesignSpace(SpaceKind.GRID, tuple(np.atleast_1d(low)), tuple(np.atleast_1d(high)), tuple(np.atleast_1d(levels)))

    @staticmethod
    def finite_set(points) -> 'DesignSpace':
        return DesignSpace(SpaceKind.FINITE_SET, points=points)

    @staticmethod
    def integer_range(first: int, last: int) -> 'DesignSpace':
        return DesignSpace.finite_set(np.arange(first, last + 1, dtype=float))

    def to_json(self) -> dict:
        if self.kind == SpaceKind.FINITE_SET:
            values = self.points[:, 0].tolist() if self.p == 1 else self.points.tolist()
            return {'kind': self.kind.value, 'points': values}

        data = {'kind': self.kind.value, 'low': list(self.low), 'high': list(self.high)}
        if self.kind == SpaceKind.GRID:
            data['levels'] = list(self.levels)
        return data

    @staticmethod
    def from_json(data: dict) -> 'DesignSpace':
        kind = SpaceKind(str(data.get('kind', '')).lower())
        if kind == SpaceKind.FINITE_SET:
            if 'points' in data:
                return DesignSpace.finite_set(data['points'])
            # Shorthand for consecutive integers, e.g. group sizes 1..61
            return DesignSpace.integer_range(int(data['first']), int(data['last']))
        if kind == SpaceKind.GRID:
            return DesignSpace.grid(data['low'], data['high'], data['levels'])
        return DesignSpace.box(data['low'], data['high'])

    def copy(self, **changes) -> 'DesignSpace':
        return replace(deepcopy(self), **changes)
