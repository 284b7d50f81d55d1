import logging

from data.models.design import ExactDesign
from data.models.run_config import RunConfig, Task
from data.repositories.result import ResultRepository
from helpers.pipeline import DesignPipeline
from modules.base_module import BaseModule

logger = logging.getLogger(__name__)


class ExactModule(BaseModule):
    name = 'exact'
    description = 'Exact n-run design by rounding an approximate optimum and annealing from it'
    task = Task.EXACT

    def run(self, config: RunConfig, pipeline: DesignPipeline, results: ResultRepository) -> dict:
        reference = None
        if config.reference_design:
            reference = self.designs.load(config.reference_design)
            if isinstance(reference, ExactDesign):
                reference = reference.to_approximate()
            logger.info(f"Using the reference design from {config.reference_design}")

        outcome = pipeline.exact(
            config.model, config.criterion, config.space, config.n, results,
            method=config.method, reference=reference,
        )
        return outcome.to_json()
