import json
import logging
import sys
import time
from argparse import Namespace
from pathlib import Path
from typing import Optional

from data.models.run_config import RunConfig, Task
from data.repositories.design import DesignRepository
from data.repositories.result import ResultRepository
from helpers.exceptions import DesignError, ConfigError
from helpers.pipeline import DesignPipeline
from integrations.filesystem.design_file import DesignFileRepository
from integrations.filesystem.result_directory import ResultDirectory

logger = logging.getLogger(__name__)


class BaseModule:
    name = ''
    description = ''
    task: Task = None

    def __init__(self, workers: Optional[int] = None, designs: Optional[DesignRepository] = None):
        self.workers = workers
        self.designs = designs or DesignFileRepository()

    def install(self, subparsers) -> None:
        parser = subparsers.add_parser(self.name, help=self.description, description=self.description)
        parser.add_argument('--config', required=True, help='path to the JSON run configuration')
        parser.add_argument('--seed', type=int, help='master seed, overrides the configuration')
        parser.add_argument('--out', help='output directory, overrides the configuration')
        parser.add_argument('--restarts', type=int, help='number of annealing restarts M')
        parser.add_argument('--n', type=int, help='number of runs of the exact design')
        parser.set_defaults(module=self)
        logger.debug(f"{self.__class__.__name__} installed")

    def execute(self, args: Namespace) -> int:
        results = None
        try:
            data = self._apply_flags(self._read_config(args.config), args)
            results = ResultDirectory(data.get('output', 'results'))

            config = RunConfig.from_json(data, self._task(data))
            pipeline = self._pipeline(config)
            started = time.perf_counter()
            result = self.run(config, pipeline, results)
            results.save_report({
                'config': config.to_json(pipeline.resolved_settings()),
                'result': result,
                'elapsed_seconds': time.perf_counter() - started,
            })
            logger.info(f"Results written to {config.output}")
            return 0
        except DesignError as e:
            logger.error(f"{e.__class__.__name__}: {e}")
            print(json.dumps(e.to_json()), file=sys.stderr)
            if results is not None:
                results.save_error(e)
            return e.code
        except Exception as e:
            logger.exception(e)
            return 1

    def run(self, config: RunConfig, pipeline: DesignPipeline, results: ResultRepository) -> dict:
        pass

    @staticmethod
    def _apply_flags(data: dict, args: Namespace) -> dict:
        # Command line flags beat the values in the configuration file
        data = dict(data)
        if args.seed is not None:
            data['seed'] = args.seed
        if args.out is not None:
            data['output'] = args.out
        if args.n is not None:
            data['n'] = args.n
        if args.restarts is not None:
            data['anneal'] = {**data.get('anneal', {}), 'M': args.restarts}
        return data

    def _task(self, data: dict) -> Task:
        if 'task' in data and data['task'] != self.task.value:
            logger.warning(f"The configuration names task {data['task']}, running {self.task.value} as requested")
        return self.task

    def _pipeline(self, config: RunConfig) -> DesignPipeline:
        return DesignPipeline(config.approx, config.anneal, self.workers)

    @staticmethod
    def _read_config(path: str) -> dict:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as error:
            raise ConfigError(f"Cannot read the configuration {path}: {error}") from error
        except json.JSONDecodeError as error:
            raise ConfigError(f"The configuration {path} is not valid JSON: {error}") from error
        if not isinstance(data, dict):
            raise ConfigError("The configuration must be a JSON object")
        return data
