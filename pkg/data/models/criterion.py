from copy import deepcopy
from dataclasses import dataclass, replace
from enum import Enum, unique
from typing import Optional

import numpy as np


@unique
class CriterionKind(Enum):
    D = "D"
    TRACE_C = "TraceC"


@dataclass(frozen=True, eq=False)
class Criterion:
    kind: CriterionKind
    c_matrix: Optional[np.ndarray] = None
    label: str = 'D'

    def __post_init__(self):
        if self.kind == CriterionKind.D:
            if self.c_matrix is not None:
                raise ValueError("The D-criterion does not take a C matrix")
            return

        if self.c_matrix is None:
            raise ValueError("A trace-class criterion needs a C matrix")

        c_matrix = np.asarray(self.c_matrix, dtype=float)
        if c_matrix.ndim == 1:
            c_matrix = c_matrix.reshape(-1, 1)
        if c_matrix.ndim != 2 or not 1 <= c_matrix.shape[1] <= c_matrix.shape[0]:
            raise ValueError(f"C must be a q x r matrix with 1 <= r <= q, got shape {c_matrix.shape}")

        # Workaround to initialize a field in a frozen class
        super().__setattr__('c_matrix', c_matrix)

    @property
    def is_d(self) -> bool:
        return self.kind == CriterionKind.D

    def fits(self, q: int) -> bool:
        return self.is_d or self.c_matrix.shape[0] == q

    @staticmethod
    def d() -> 'Criterion':
        return Criterion(CriterionKind.D)

    @staticmethod
    def a(q: int) -> 'Criterion':
        return Criterion(CriterionKind.TRACE_C, np.eye(q), 'A')

    @staticmethod
    def c(vector) -> 'Criterion':
        return Criterion(CriterionKind.TRACE_C, np.asarray(vector, dtype=float).reshape(-1, 1), 'c')

    @staticmethod
    def trace(matrix, label: str = 'I') -> 'Criterion':
        return Criterion(CriterionKind.TRACE_C, np.asarray(matrix, dtype=float), label)

    def to_json(self) -> dict:
        data = {'kind': self.kind.value, 'label': self.label}
        if self.c_matrix is not None:
            data['C'] = self.c_matrix.tolist()
        return data

    @staticmethod
    def from_json(data: dict, q: int) -> 'Criterion':
        kind = str(data.get('kind', 'D'))
        if kind.upper() == 'D':
            return Criterion.d()
        if kind.upper() == 'A':
            return Criterion.a(q)
        if kind == 'c':
            return Criterion.c(data['c'])
        if kind == CriterionKind.TRACE_C.value:
            return Criterion.trace(data['C'], data.get('label', 'I'))
        raise ValueError(f"Unknown criterion kind '{kind}'; use D, A, c or TraceC")

    def copy(self, **changes) -> 'Criterion':
        return replace(deepcopy(self), **changes)
