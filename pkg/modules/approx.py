import logging

from data.models.run_config import RunConfig, Task
from data.repositories.result import ResultRepository
from helpers.pipeline import DesignPipeline
from modules.base_module import BaseModule

logger = logging.getLogger(__name__)


class ApproxModule(BaseModule):
    name = 'approx'
    description = 'Optimal approximate design on the candidate grid, certified by the equivalence theorem'
    task = Task.APPROX

    def run(self, config: RunConfig, pipeline: DesignPipeline, results: ResultRepository) -> dict:
        outcome = pipeline.approximate(config.model, config.criterion, config.space, results)
        return outcome.to_json()
