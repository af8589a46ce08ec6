"""Spiking network + cellular learning automata robot navigation simulator."""
from .config import ExperimentConfig, load_config
from .directions import Direction
from .engine import make_engine, run_epoch, step_env
from .harness import run_experiment, write_report, write_weight_trace

__all__ = ["Direction", "ExperimentConfig", "load_config", "make_engine", "run_epoch",
           "step_env", "run_experiment", "write_report", "write_weight_trace"]
