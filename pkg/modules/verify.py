import logging

from data.models.run_config import RunConfig, Task
from data.repositories.result import ResultRepository
from helpers.pipeline import DesignPipeline
from modules.base_module import BaseModule

logger = logging.getLogger(__name__)


class VerifyModule(BaseModule):
    name = 'verify'
    description = 'Equivalence-theorem check of a design file against the candidate grid'
    task = Task.VERIFY

    def run(self, config: RunConfig, pipeline: DesignPipeline, results: ResultRepository) -> dict:
        design = self.designs.load(config.design)
        return pipeline.verify(
            config.model, config.criterion, design, config.space, results,
            tolerance=config.approx.eq_tolerance,
        )
