import logging
import os
import sys
from argparse import ArgumentParser
from typing import Optional

from dotenv import load_dotenv

from integrations.filesystem.design_file import DesignFileRepository

from modules.approx import ApproxModule
from modules.exact import ExactModule
from modules.maximin import MaximinModule
from modules.verify import VerifyModule
from modules.preset import PresetModule

load_dotenv()

logger = logging.getLogger(__name__)


class MainConfig:
    def __init__(self):
        self.log_level = logging.getLevelName(os.getenv('log_level', 'INFO'))
        # Empty means all available cores
        self.design_workers = int(os.getenv('design_workers') or 0) or os.cpu_count() or 1


def main(argv: Optional[list[str]] = None) -> int:
    config = MainConfig()
    logging.basicConfig(level=config.log_level, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    designs = DesignFileRepository()
    modules = [
        ApproxModule(workers=config.design_workers, designs=designs),
        ExactModule(workers=config.design_workers, designs=designs),
        MaximinModule(workers=config.design_workers, designs=designs),
        VerifyModule(workers=config.design_workers, designs=designs),
        PresetModule(workers=config.design_workers, designs=designs),
    ]

    parser = ArgumentParser(prog='main.py', description='Optimal approximate and exact experimental designs')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for module in modules:
        module.install(subparsers)

    args = parser.parse_args(argv)
    logger.info(f"Running {args.command} with {config.design_workers} worker threads")
    return args.module.execute(args)


if __name__ == '__main__':
    sys.exit(main())
