import os
import json
import logging
from dataclasses import dataclass, fields, asdict
from typing import Optional, Dict, Any

import psutil

logger = logging.getLogger(__name__)

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_PATH = os.path.join(PROJECT_ROOT, "config", "solver_config.json")
CONFIG_ENV = "KGDOM_CONFIG"


@dataclass(frozen=True)
class SolverConfig:
    """Ceilings and budgets shared by the solver, the verifier and the scanner."""
    bnb_max_n: int = 128
    exhaustive_max_n: int = 24
    node_budget: int = 10 ** 8
    time_budget_s: float = 60.0
    dense_max_n: int = 8192
    certify_max_n: int = 1 << 20
    slack_c: float = 1.0
    workers: Optional[int] = None

    def effective_workers(self) -> int:
        if self.workers:
            return max(1, int(self.workers))
        # 預設使用實體核心數
        return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def load_config(path: Optional[str] = None) -> SolverConfig:
    """Load solver configuration from JSON, falling back to defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV, DEFAULT_CONFIG_PATH)

    try:
        with open(path, 'r') as f:
            raw = json.load(f)
    except FileNotFoundError:
        logger.warning(f"Config file not found: {path}")
        return SolverConfig()
    except json.JSONDecodeError:
        logger.error(f"Invalid JSON in config file: {path}")
        return SolverConfig()

    known = {f.name for f in fields(SolverConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        logger.warning(f"Ignoring unknown config keys in {path}: {unknown}")
    config = SolverConfig(**{k: v for k, v in raw.items() if k in known})
    logger.debug(f"Loaded configuration: {config}")
    return config
