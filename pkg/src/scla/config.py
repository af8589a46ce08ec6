"""Experiment configuration and the line-based ``key = value`` config format."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .plasticity import StdpParams

MODES = ("scla", "cla-only")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    mode: str = "scla"
    epochs: int = 20
    steps_per_epoch: int = 1000
    seed: int = 0

    # neural simulation
    dt: float = 1.0
    t_window: int = 20
    i_sense: float = 19.5
    i_noise: float = 20.0
    k_out: int = 10
    k_inh: int = 25
    w_init: float = 1.0

    # plasticity
    a_plus: float = 1.0
    a_minus: float = 1.5
    tau_plus: float = 20.0
    tau_minus: float = 5.0
    tau_c: float = 1000.0
    tau_d: float = 200.0
    w_max: float = 4.0

    # reward dispatch
    d_amp: float = 0.5
    d_reach: float = 1.0

    # automata
    lambda_r: float = 0.001
    lambda_p: float = 0.0002
    mu: float = 0.0

    # outputs
    out_dir: Optional[str] = None
    weight_trace: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r} (expected one of {', '.join(MODES)})")
        for name in ("epochs", "steps_per_epoch", "k_out", "k_inh"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.t_window < 1:
            raise ConfigError("t_window must be >= 1")
        if self.dt != 1.0:
            raise ConfigError("dt is fixed at 1 ms")
        for name in ("lambda_r", "lambda_p", "mu"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        for name in ("i_sense", "i_noise", "d_amp", "d_reach"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not 0 <= self.w_init <= self.w_max:
            raise ConfigError("w_init must lie in [0, w_max]")
        try:
            self.stdp
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def stdp(self) -> StdpParams:
        return StdpParams(self.a_plus, self.a_minus, self.tau_plus, self.tau_minus,
                          self.tau_c, self.tau_d, self.w_max)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]


FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def coerce(key: str, text: str):
    """Convert ``text`` to the declared type of config field ``key``."""
    if key not in FIELD_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    kind = FIELD_TYPES[key]
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} for {key}") from None
    if kind == "Optional[str]" and text.lower() in ("", "none"):
        return None
    return text


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            values[key] = coerce(key, value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return values


def load_config(path, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = parse_config_text(path.read_text(encoding="utf-8"))
    return (base or ExperimentConfig()).replace(**values)
