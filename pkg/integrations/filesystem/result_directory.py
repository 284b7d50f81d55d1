import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from data.models.design import ApproximateDesign, ExactDesign
from data.models.solve_report import AnnealTrace, SearchReport
from data.repositories.result import ResultRepository
from helpers.efficiency import design_cdf
from helpers.exceptions import DesignError
from helpers.json import default
from integrations.filesystem.design_file import CSV_FLOAT_FORMAT, coordinate_columns, design_frame

logger = logging.getLogger(__name__)


class ResultDirectory(ResultRepository):
    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def child(self, name: str) -> 'ResultDirectory':
        return ResultDirectory(self.directory / name)

    def save_design(self, design: Union[ApproximateDesign, ExactDesign], summary: dict) -> None:
        design = design.sorted()
        self._write_csv('design.csv', design_frame(design))
        self._write_json('design.json', {**design.to_json(), **summary})

    def save_report(self, report: dict) -> None:
        self._write_json('report.json', report)

    def save_profile(self, candidates: np.ndarray, profile: np.ndarray) -> None:
        frame = pd.DataFrame(candidates, columns=coordinate_columns(candidates.shape[1]))
        frame['d'] = profile
        self._write_csv('dprofile.csv', frame)

    def save_cdf(self, design: Union[ApproximateDesign, ExactDesign]) -> None:
        self._write_csv('cdf.csv', pd.DataFrame(design_cdf(design), columns=['x', 'cumulative_weight']))

    def save_search(self, search: SearchReport) -> None:
        frame = pd.DataFrame([
            {
                'restart': report.restart,
                'initial_loss': report.initial_loss,
                'final_loss': report.final_loss,
                'modified_efficiency': report.modified_efficiency,
                'iterations': report.iterations,
                'accepted': report.accepted,
                'highly_efficient': report.highly_efficient,
                'verdict': 'aborted' if report.aborted else ('best' if report.restart == search.best_restart else 'kept'),
            }
            for report in search.restarts
        ])
        self._write_csv('restarts.csv', frame)

        for report in search.restarts:
            if not report.aborted:
                self.save_trace(report.restart, report.trace)

    def save_trace(self, restart: int, trace: AnnealTrace) -> None:
        frame = pd.DataFrame({
            'iteration': trace.iteration,
            'temperature': trace.temperature,
            'loss': trace.proposed_loss,
            'accepted': trace.accepted.astype(int),
            'best_loss': trace.best_loss,
        })
        self._write_csv(f'trace_{restart}.csv', frame)

    def save_comparison(self, rows: list[dict]) -> None:
        self._write_csv('comparison.csv', pd.DataFrame(rows, columns=['study', 'quantity', 'obtained', 'reported']))

    def save_error(self, error: DesignError) -> None:
        self._write_json('error.json', error.to_json())

    def _write_csv(self, name: str, frame: pd.DataFrame) -> None:
        frame.to_csv(self.directory / name, index=False, float_format=CSV_FLOAT_FORMAT)
        logger.debug(f"Wrote {self.directory / name}")

    def _write_json(self, name: str, data: dict) -> None:
        (self.directory / name).write_text(json.dumps(data, default=default, indent=2))
        logger.debug(f"Wrote {self.directory / name}")
