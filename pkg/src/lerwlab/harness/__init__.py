from .config import ExperimentConfig, load_config, parse_config
from .experiments import EXPERIMENT_RUNNERS, run_experiment
from .results import ResultRecord

__all__ = [
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "run_experiment",
    "EXPERIMENT_RUNNERS",
    "ResultRecord",
]
