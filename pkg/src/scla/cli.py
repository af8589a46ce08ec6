"""Command line entry point: ``scla-sim run [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import MODES, ConfigError, ExperimentConfig, FIELD_TYPES, coerce, load_config
from .harness import ReportError, run_experiment, write_outputs

# flags with their own spelling; every other config field gets --field-name
_NAMED = {"mode": "--mode", "epochs": "--epochs", "steps_per_epoch": "--steps",
          "seed": "--seed", "out_dir": "--out", "weight_trace": "--weight-trace"}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scla-sim run",
                                description="Run an SCLA or CLA-only grid-world experiment.")
    p.add_argument("--config", metavar="PATH", help="key = value config file")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--epochs", type=int)
    p.add_argument("--steps", dest="steps_per_epoch", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="out_dir", metavar="DIR")
    p.add_argument("--weight-trace", action="store_true", default=None,
                   help="also write weights.csv")
    p.add_argument("--seeds", metavar="A,B,C",
                   help="run one experiment per seed, each into DIR/seed_<n>")
    p.add_argument("-v", "--verbose", action="store_true")
    tuning = p.add_argument_group("model constants")
    for name in FIELD_TYPES:
        if name in _NAMED:
            continue
        tuning.add_argument("--" + name.replace("_", "-"), dest=name, metavar="X",
                            type=lambda text, name=name: coerce(name, text))
    return p


def _seed_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse seed list {text!r}") from None


def _parse(argv):
    parser = _parser()
    ns = parser.parse_args(argv)
    try:
        config = load_config(ns.config) if ns.config else ExperimentConfig()
        overrides = {k: v for k, v in vars(ns).items() if k in FIELD_TYPES and v is not None}
        config = config.replace(**overrides)
        seeds = _seed_list(ns.seeds) if ns.seeds else None
    except ConfigError as exc:
        parser.error(str(exc))
    return config, seeds, ns.verbose


def parse_args(argv) -> ExperimentConfig:
    """Flags override config-file values, which override built-in defaults."""
    return _parse(argv)[0]


def _run_one(config: ExperimentConfig) -> None:
    report = run_experiment(config)
    print(f"{config.mode} seed={config.seed}: mean successes {report.mean_successes:.2f} "
          f"over {len(report.epochs)} epochs")
    if config.out_dir:
        write_outputs(report, config.out_dir, config.weight_trace)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] != "run":
        print("usage: scla-sim run [options]  (scla-sim run --help for options)",
              file=sys.stderr)
        return 2
    config, seeds, verbose = _parse(argv[1:])
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(message)s")
    try:
        if seeds is None:
            _run_one(config)
        else:
            for seed in seeds:
                out = str(Path(config.out_dir) / f"seed_{seed}") if config.out_dir else None
                _run_one(config.replace(seed=seed, out_dir=out))
    except (ReportError, ConfigError, FloatingPointError) as exc:
        print(f"scla-sim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
