"""Experiment orchestration and CSV output."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .config import ExperimentConfig
from .engine import EpochStats, make_engine, run_epoch
from .network import GROUP_LABELS

log = logging.getLogger(__name__)

EPOCH_HEADER = ["epoch", "successes"] + [f"w_{label}" for label in GROUP_LABELS]
SUMMARY_HEADER = ["mode", "epochs", "steps", "mean_successes", "seed"]
TRACE_HEADER = ["step", "group", "mean_weight"]


class ReportError(OSError):
    pass


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    epochs: list[EpochStats] = field(default_factory=list)

    @property
    def mode(self) -> str:
        return self.config.mode

    @property
    def successes(self) -> list[int]:
        return [e.successes for e in self.epochs]

    @property
    def mean_successes(self) -> float:
        """Mean successes per epoch; NaN for an empty report."""
        return float(np.mean(self.successes)) if self.epochs else math.nan

    def weight_samples(self) -> np.ndarray:
        if not self.epochs:
            return np.empty((0, len(GROUP_LABELS)))
        return np.concatenate([e.weight_samples for e in self.epochs])


def run_experiment(config: ExperimentConfig,
                   on_epoch: Optional[Callable[[EpochStats], None]] = None) -> ExperimentReport:
    """Run ``config.epochs`` epochs on one engine; learning carries over."""
    config.validate()
    engine = make_engine(config)
    report = ExperimentReport(config)
    for _ in range(config.epochs):
        _, stats = run_epoch(engine, config.steps_per_epoch)
        report.epochs.append(stats)
        log.info("epoch %d: %d successes", stats.epoch + 1, stats.successes)
        if on_epoch is not None:
            on_epoch(stats)
    return report


def _fmt(x) -> str:
    # repr gives the shortest round-tripping decimal
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _open_for_write(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_report(report: ExperimentReport, path) -> Path:
    """Write per-epoch rows to ``path`` and the mean to ``summary.csv`` beside it."""
    path = Path(path)
    with _open_for_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EPOCH_HEADER)
        for e in report.epochs:
            writer.writerow([e.epoch + 1, e.successes] + [_fmt(w) for w in e.group_weights])
    cfg = report.config
    with _open_for_write(path.parent / "summary.csv") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        writer.writerow([cfg.mode, len(report.epochs), cfg.steps_per_epoch,
                         _fmt(report.mean_successes), cfg.seed])
    return path


def write_weight_trace(samples, path) -> Path:
    """One row per (step, group); steps are numbered from 1 and sampled
    after the step completes."""
    samples = np.asarray(samples)
    with _open_for_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for step, row in enumerate(samples, 1):
            for label, w in zip(GROUP_LABELS, row):
                writer.writerow([step, label, _fmt(w)])
    return Path(path)


def read_report(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: (int(v) if k in ("epoch", "successes") else float(v)) for k, v in r.items()}
            for r in rows]


def write_outputs(report: ExperimentReport, out_dir, weight_trace: bool = False) -> list[Path]:
    out_dir = Path(out_dir)
    written = [write_report(report, out_dir / "epochs.csv"), out_dir / "summary.csv"]
    if weight_trace:
        written.append(write_weight_trace(report.weight_samples(), out_dir / "weights.csv"))
    return written
