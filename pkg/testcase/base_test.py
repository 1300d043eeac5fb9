import os
import logging
from datetime import datetime

from kgdom.config import PROJECT_ROOT, SolverConfig, load_config
from kgdom.logsetup import setup_logging


class BaseTest:
    @classmethod
    def setup_class(cls):
        """Set up test class - called before any tests are run."""
        cls._setup_logging()
        cls.config = cls._load_solver_config()

    @classmethod
    def _setup_logging(cls):
        """Configure logging system."""
        log_dir = os.path.join(PROJECT_ROOT, "logs")
        setup_logging(log_dir, prefix="test_execution")

        # 建立測試開始的標記
        root_logger = logging.getLogger()
        root_logger.info("=" * 80)
        root_logger.info(f"Test session started at {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        root_logger.info("=" * 80)

        cls.logger = logging.getLogger(cls.__name__)
        cls.logger.info(f"Logger initialized for {cls.__name__}")

    @classmethod
    def _load_solver_config(cls) -> SolverConfig:
        config = load_config()
        cls.logger.debug(f"Loaded configuration: {config}")
        return config

    @staticmethod
    def even_range(lo, hi):
        return range(lo + (lo % 2), hi + 1, 2)
