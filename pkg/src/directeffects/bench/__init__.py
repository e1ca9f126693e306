"""Simulation grid runner, summaries, figures and the command line."""

from .config import PRESETS, Cell, ExperimentConfig, desk_scale
from .runner import gen_data, read_results, read_summary, run, run_real, summarize, summarize_rows

__all__ = [
    "Cell",
    "ExperimentConfig",
    "PRESETS",
    "desk_scale",
    "gen_data",
    "read_results",
    "read_summary",
    "run",
    "run_real",
    "summarize",
    "summarize_rows",
]
