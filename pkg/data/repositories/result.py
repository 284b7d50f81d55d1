from typing import Union

import numpy as np

from data.models.design import ApproximateDesign, ExactDesign
from data.models.solve_report import AnnealTrace, SearchReport
from helpers.exceptions import DesignError


class ResultRepository:
    def child(self, name: str) -> 'ResultRepository':
        pass

    def save_design(self, design: Union[ApproximateDesign, ExactDesign], summary: dict) -> None:
        pass

    def save_report(self, report: dict) -> None:
        pass

    def save_profile(self, candidates: np.ndarray, profile: np.ndarray) -> None:
        pass

    def save_cdf(self, design: Union[ApproximateDesign, ExactDesign]) -> None:
        pass

    def save_search(self, search: SearchReport) -> None:
        pass

    def save_trace(self, restart: int, trace: AnnealTrace) -> None:
        pass

    def save_comparison(self, rows: list[dict]) -> None:
        pass

    def save_error(self, error: DesignError) -> None:
        pass
