from copy import deepcopy
from dataclasses import dataclass, replace
from typing import Optional

DEFAULT_SEED = 20240615


@dataclass(frozen=True)
class ApproxSolveOptions:
    # None means "scale-aware default", resolved by the solver from the problem
    eq_tolerance: Optional[float] = None
    max_iterations: int = 20000
    prune_threshold: float = 1e-4

    def __post_init__(self):
        if self.eq_tolerance is not None and self.eq_tolerance <= 0:
            raise ValueError("The equivalence tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("The solver needs at least one iteration")
        # Genuine support can carry weights as small as 0.0033, so pruning must stay below that
        if not 0 <= self.prune_threshold < 0.003:
            raise ValueError("The prune threshold must lie in [0, 0.003)")

    def to_json(self) -> dict:
        return {
            'eq_tolerance': self.eq_tolerance,
            'max_iterations': self.max_iterations,
            'prune_threshold': self.prune_threshold,
        }

    @staticmethod
    def from_json(data: dict) -> 'ApproxSolveOptions':
        return ApproxSolveOptions(
            eq_tolerance=data.get('eq_tolerance'),
            max_iterations=int(data.get('max_iterations', 20000)),
            prune_threshold=float(data.get('prune_threshold', 1e-4)),
        )

    def copy(self, **changes) -> 'ApproxSolveOptions':
        return replace(deepcopy(self), **changes)


@dataclass(frozen=True)
class AnnealConfig:
    # t0, t_min and k default to values derived from the initial design (see resolve)
    t0: Optional[float] = None
    t_min: Optional[float] = None
    alpha: float = 0.9
    k: Optional[int] = None
    delta: float = 1e-5
    restarts: int = 10
    seed: int = DEFAULT_SEED
    target_efficiency: float = 0.95

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("The cooling factor must lie strictly between 0 and 1")
        if self.t0 is not None and self.t0 <= 0:
            raise ValueError("The initial temperature must be positive")
        if self.t0 is not None and self.t_min is not None and self.t_min >= self.t0:
            raise ValueError("The minimum temperature must be below the initial temperature")
        if self.k is not None and self.k < 1:
            raise ValueError("Each temperature needs at least one iteration")
        if self.restarts < 1:
            raise ValueError("At least one restart is needed")
        if self.delta <= 0:
            raise ValueError("The convergence tolerance must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("The seed must be an unsigned 64-bit integer")

    def resolve(self, initial_loss: float, n: int) -> tuple[float, float, int]:
        t0 = self.t0 if self.t0 is not None else 0.1 * abs(initial_loss)
        t_min = self.t_min if self.t_min is not None else 1e-6 * t0
        k = self.k if self.k is not None else 50 * n
        return t0, t_min, k

    def to_json(self) -> dict:
        return {
            'T0': self.t0,
            'T_min': self.t_min,
            'alpha': self.alpha,
            'K': self.k,
            'delta': self.delta,
            'M': self.restarts,
            'seed': self.seed,
            'target_efficiency': self.target_efficiency,
        }

    @staticmethod
    def from_json(data: dict) -> 'AnnealConfig':
        return AnnealConfig(
            t0=data.get('T0'),
            t_min=data.get('T_min'),
            alpha=float(data.get('alpha', 0.9)),
            k=data.get('K'),
            delta=float(data.get('delta', 1e-5)),
            restarts=int(data.get('M', 10)),
            seed=int(data.get('seed', DEFAULT_SEED)),
            target_efficiency=float(data.get('target_efficiency', 0.95)),
        )

    def copy(self, **changes) -> 'AnnealConfig':
        return replace(deepcopy(self), **changes)
