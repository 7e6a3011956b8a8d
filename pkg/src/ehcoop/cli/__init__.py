from .config import ConfigError, ExperimentSpec, load_config, load_preset
from .experiments import ComparisonReport, read_csv, reproduce_figure, run_experiment, write_csv
from .main import main

__all__ = [
    "ComparisonReport",
    "ConfigError",
    "ExperimentSpec",
    "load_config",
    "load_preset",
    "main",
    "read_csv",
    "reproduce_figure",
    "run_experiment",
    "write_csv",
]
