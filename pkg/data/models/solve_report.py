from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from data.models.design import ExactDesign
from helpers.json import finite_or_none


@dataclass(frozen=True)
class SolveReport:
    loss: float
    max_derivative: float
    argmax_point: list[float]
    eq_tolerance: float
    iterations: int
    converged: bool
    loss_history: list[float] = field(default_factory=list, repr=False)
    efficiencies: list[float] = field(default_factory=list)
    min_efficiency: Optional[float] = None
    mixing_weights: list[float] = field(default_factory=list)
    efficiency_bound: Optional[float] = None
    elapsed_seconds: float = 0.0

    @property
    def verdict(self) -> str:
        return 'optimal' if self.max_derivative <= self.eq_tolerance else 'not optimal'

    def to_json(self) -> dict:
        data = {
            'loss': finite_or_none(self.loss),
            'max_derivative': finite_or_none(self.max_derivative),
            'argmax_point': self.argmax_point,
            'eq_tolerance': self.eq_tolerance,
            'iterations': self.iterations,
            'converged': self.converged,
            'verdict': self.verdict,
            'elapsed_seconds': self.elapsed_seconds,
        }
        if self.efficiencies:
            data['efficiencies'] = self.efficiencies
            data['min_efficiency'] = self.min_efficiency
            data['mixing_weights'] = self.mixing_weights
            data['efficiency_bound'] = finite_or_none(self.efficiency_bound)
        return data


@dataclass(frozen=True, eq=False)
class AnnealTrace:
    iteration: np.ndarray
    temperature: np.ndarray
    proposed_loss: np.ndarray
    accepted: np.ndarray
    best_loss: np.ndarray

    def __len__(self) -> int:
        return self.iteration.shape[0]

    @staticmethod
    def empty() -> 'AnnealTrace':
        return AnnealTrace(np.empty(0, dtype=np.int64), np.empty(0), np.empty(0), np.empty(0, dtype=bool), np.empty(0))


@dataclass(frozen=True, eq=False)
class RestartReport:
    restart: int
    initial_loss: float
    final_loss: float
    modified_efficiency: float
    iterations: int
    accepted: int
    design: Optional[ExactDesign] = None
    trace: AnnealTrace = field(default_factory=AnnealTrace.empty, repr=False)
    temperatures: tuple[float, float, int] = (0.0, 0.0, 0)
    highly_efficient: bool = False
    diagnostic: Optional[str] = None

    @property
    def aborted(self) -> bool:
        return self.diagnostic is not None

    def to_json(self) -> dict:
        t0, t_min, k = self.temperatures
        return {
            'restart': self.restart,
            'initial_loss': finite_or_none(self.initial_loss),
            'final_loss': finite_or_none(self.final_loss),
            'modified_efficiency': finite_or_none(self.modified_efficiency),
            'iterations': self.iterations,
            'accepted': self.accepted,
            'T0': t0,
            'T_min': t_min,
            'K': k,
            'highly_efficient': self.highly_efficient,
            'diagnostic': self.diagnostic,
        }


@dataclass(frozen=True, eq=False)
class SearchReport:
    best_restart: int
    restarts: list[RestartReport]
    reference_loss: float
    target_efficiency: float

    @property
    def best(self) -> RestartReport:
        return self.restarts[self.best_restart]

    @property
    def target_reached(self) -> bool:
        return any(report.highly_efficient for report in self.restarts)

    def to_json(self) -> dict:
        return {
            'best_restart': self.best_restart,
            'reference_loss': finite_or_none(self.reference_loss),
            'target_efficiency': self.target_efficiency,
            'target_reached': self.target_reached,
            'restarts': [report.to_json() for report in self.restarts],
        }
