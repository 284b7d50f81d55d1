import logging

from data.models.run_config import RunConfig, Task
from data.repositories.result import ResultRepository
from helpers.pipeline import DesignPipeline
from modules.base_module import BaseModule

logger = logging.getLogger(__name__)


class MaximinModule(BaseModule):
    name = 'maximin'
    description = 'Maximin efficiency design over several objectives, optionally followed by an exact n-run design'
    task = Task.MAXIMIN_APPROX

    def run(self, config: RunConfig, pipeline: DesignPipeline, results: ResultRepository) -> dict:
        exact = config.task == Task.MAXIMIN_EXACT

        # The exact design owns the top-level files when there is one
        problem, outcome = pipeline.maximin(config.objectives, config.space, results.child('approximate') if exact else results)
        result = {'reference_losses': list(problem.reference_losses), 'approximate': outcome.to_json()}
        if exact:
            result['exact'] = pipeline.maximin_exact(problem, outcome.design, config.space, config.n, results).to_json()
        return result

    def _task(self, data: dict) -> Task:
        # A run count turns the maximin run into an exact one
        return Task.MAXIMIN_EXACT if data.get('n') is not None else Task.MAXIMIN_APPROX
