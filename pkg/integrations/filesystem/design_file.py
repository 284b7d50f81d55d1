import json
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from data.models.design import ApproximateDesign, ExactDesign
from data.repositories.design import DesignRepository
from helpers.exceptions import ConfigError
from helpers.json import default

AnyDesign = Union[ApproximateDesign, ExactDesign]

CSV_FLOAT_FORMAT = '%.6g'


def coordinate_columns(p: int) -> list[str]:
    return [f"x{dimension + 1}" for dimension in range(p)]


def design_frame(design: AnyDesign) -> pd.DataFrame:
    frame = pd.DataFrame(design.points, columns=coordinate_columns(design.p))
    if isinstance(design, ExactDesign):
        frame['count'] = design.counts
    else:
        frame['weight'] = design.weights
    return frame


class DesignFileRepository(DesignRepository):
    """Designs as CSV (one row per support point) or JSON (full precision), chosen by file extension."""

    def load(self, path: str) -> AnyDesign:
        file = Path(path)
        if not file.is_file():
            raise ConfigError(f"Design file {path} does not exist")

        try:
            if file.suffix.lower() == '.json':
                return self._load_json(file)
            return self._load_csv(file)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as error:
            raise ConfigError(f"Design file {path} is not a valid design: {error!r}") from error

    def save(self, design: AnyDesign, path: str) -> None:
        file = Path(path)
        file.parent.mkdir(parents=True, exist_ok=True)
        if file.suffix.lower() == '.json':
            file.write_text(json.dumps(design, default=default, indent=2))
        else:
            design_frame(design).to_csv(file, index=False, float_format=CSV_FLOAT_FORMAT)

    @staticmethod
    def _load_json(file: Path) -> AnyDesign:
        data = json.loads(file.read_text())
        if 'counts' in data:
            return ExactDesign.from_json(data)
        return ApproximateDesign.from_json(data)

    @staticmethod
    def _load_csv(file: Path) -> AnyDesign:
        frame = pd.read_csv(file)
        coordinates = [column for column in frame.columns if column.startswith('x')]
        if not coordinates:
            raise ConfigError(f"Design file {file} has no coordinate columns (x1, x2, ...)")

        points = frame[coordinates].to_numpy(dtype=float)
        if 'count' in frame.columns:
            return ExactDesign(points, frame['count'].to_numpy())
        weights = frame['weight'].to_numpy(dtype=float)
        # Six significant digits do not sum to exactly 1
        return ApproximateDesign(points, weights / np.sum(weights))
