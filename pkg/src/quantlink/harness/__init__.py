"""Experiment orchestration: configs, runners, CSV output, figures, CLI."""

from .config import EXPERIMENTS, ExperimentConfig, build_config, load_config_file
from .experiments import RateCurve, run_experiment
from .output import curves_to_csv, summary_table, write_csv
from .plots import render_figure

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "build_config",
    "load_config_file",
    "RateCurve",
    "run_experiment",
    "curves_to_csv",
    "summary_table",
    "write_csv",
    "render_figure",
]
