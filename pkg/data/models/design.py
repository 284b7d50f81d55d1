from copy import deepcopy
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

MERGE_DISTANCE = 1e-9
WEIGHT_SUM_TOLERANCE = 1e-6


def _as_point_array(points) -> np.ndarray:
    array = np.asarray(points, dtype=float)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    return array


def _merge_duplicates(points: np.ndarray, amounts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Annealing can park two runs on coincident points, so points closer than MERGE_DISTANCE are folded together
    count = points.shape[0]
    if count < 2:
        return points, amounts
    pairs = cKDTree(points).query_pairs(MERGE_DISTANCE, output_type='ndarray')
    if pairs.shape[0] == 0:
        return points, amounts

    graph = coo_matrix((np.ones(pairs.shape[0]), (pairs[:, 0], pairs[:, 1])), shape=(count, count))
    _, labels = connected_components(graph, directed=False)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    totals = np.zeros(first.size, dtype=amounts.dtype)
    np.add.at(totals, inverse, amounts)

    # Each group keeps its first point, in order of first appearance
    order = np.argsort(first, kind='stable')
    return points[first[order]], totals[order]


@dataclass(frozen=True, eq=False)
class ApproximateDesign:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = _as_point_array(self.points)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)

        if points.shape[0] != weights.shape[0]:
            raise ValueError(f"A design needs one weight per point ({points.shape[0]} points, {weights.shape[0]} weights)")
        if points.shape[0] == 0:
            raise ValueError("A design needs at least one point")
        if np.any(weights < 0):
            raise ValueError("Design weights must be nonnegative")

        total = weights.sum()
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"Design weights must sum to 1, got {total}")

        points, weights = _merge_duplicates(points, weights)
        weights = weights / weights.sum()

        # Workaround to initialize a field in a frozen class
        super().__setattr__('points', points)
        super().__setattr__('weights', weights)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        return self.points.shape[1]

    def pruned(self, threshold: float) -> 'ApproximateDesign':
        keep = self.weights >= threshold
        if not np.any(keep):
            keep = self.weights == self.weights.max()
        return ApproximateDesign(self.points[keep], self.weights[keep] / self.weights[keep].sum())

    def sorted(self) -> 'ApproximateDesign':
        order = np.lexsort(self.points.T[::-1])
        return ApproximateDesign(self.points[order], self.weights[order])

    def to_json(self) -> dict:
        return {
            'points': self.points.tolist(),
            'weights': self.weights.tolist(),
        }

    @staticmethod
    def from_json(data: dict) -> 'ApproximateDesign':
        return ApproximateDesign(data['points'], data['weights'])

    @staticmethod
    def uniform(points) -> 'ApproximateDesign':
        points = _as_point_array(points)
        return ApproximateDesign(points, np.full(points.shape[0], 1.0 / points.shape[0]))

    def copy(self, **changes) -> 'ApproximateDesign':
        return replace(deepcopy(self), **changes)


@dataclass(frozen=True, eq=False)
class ExactDesign:
    points: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        points = _as_point_array(self.points)
        counts = np.asarray(self.counts).reshape(-1)

        if points.shape[0] != counts.shape[0]:
            raise ValueError(f"An exact design needs one count per point ({points.shape[0]} points, {counts.shape[0]} counts)")
        if not np.all(np.equal(np.mod(counts, 1), 0)):
            raise ValueError("Run counts must be integers")
        counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ValueError("Run counts must be nonnegative")

        # Points that receive no runs are not part of the design
        points, counts = _merge_duplicates(points[counts > 0], counts[counts > 0])
        if points.shape[0] == 0:
            raise ValueError("An exact design needs at least one run")

        # Workaround to initialize a field in a frozen class
        super().__setattr__('points', points)
        super().__setattr__('counts', counts)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        return self.points.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return self.counts / self.n

    @property
    def runs(self) -> np.ndarray:
        # One row per run, so a point with count k appears k times
        return np.repeat(self.points, self.counts, axis=0)

    def to_approximate(self) -> ApproximateDesign:
        return ApproximateDesign(self.points, self.weights)

    def sorted(self) -> 'ExactDesign':
        order = np.lexsort(self.points.T[::-1])
        return ExactDesign(self.points[order], self.counts[order])

    def to_json(self) -> dict:
        return {
            'n': self.n,
            'points': self.points.tolist(),
            'counts': self.counts.tolist(),
        }

    @staticmethod
    def from_json(data: dict) -> 'ExactDesign':
        design = ExactDesign(data['points'], data['counts'])
        if 'n' in data and int(data['n']) != design.n:
            raise ValueError(f"Run counts sum to {design.n}, but the design declares n={data['n']}")
        return design

    @staticmethod
    def from_runs(runs) -> 'ExactDesign':
        runs = _as_point_array(runs)
        return ExactDesign(runs, np.ones(runs.shape[0], dtype=np.int64))

    def copy(self, **changes) -> 'ExactDesign':
        return replace(deepcopy(self), **changes)
