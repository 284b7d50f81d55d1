import logging

from data.models.run_config import RunConfig, Task
from data.repositories.result import ResultRepository
from helpers.pipeline import DesignPipeline
from helpers.applications import ApplicationId, build_application, run_application
from modules.base_module import BaseModule

logger = logging.getLogger(__name__)


class PresetModule(BaseModule):
    name = 'preset'
    description = 'Reproduce one of the bundled applications and compare against the reported values'
    task = Task.PRESET

    def run(self, config: RunConfig, pipeline: DesignPipeline, results: ResultRepository) -> dict:
        application = build_application(ApplicationId.parse(config.application), config.theta_stars)
        n_values = (config.n,) if config.n is not None else config.n_values
        rows = run_application(application, pipeline, results, n_values)
        return {'application': application.id.value, 'comparison': rows}
