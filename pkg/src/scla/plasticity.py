"""Spike-timing dependent eligibility traces with dopamine-gated consolidation.

Spike pairings only tag synapses (eligibility ``c``); weights move solely
through ``apply_dopamine``: w <- clamp(w + c * modulator * dt, 0, w_max).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

PLASTIC = "plastic"
INHIBITORY = "Inhibitory"
BACKGROUND = "Background"


@dataclass(frozen=True)
class StdpParams:
    a_plus: float = 1.0
    a_minus: float = 1.5
    tau_plus: float = 20.0
    tau_minus: float = 20.0
    tau_c: float = 1000.0
    tau_d: float = 200.0
    w_max: float = 4.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class Synapse:
    pre: int
    post: int
    w: float
    c: float = 0.0
    group: Optional[str] = None  # one of the 8 group labels, or INHIBITORY/BACKGROUND

    @property
    def plastic(self) -> bool:
        return self.group not in (None, INHIBITORY, BACKGROUND)


@dataclass(frozen=True)
class SpikePair:
    t_pre: float
    t_post: float

    def __post_init__(self):
        if self.t_pre < 0 or self.t_post < 0:
            raise ValueError("spike times must be non-negative")


def stdp_window(tau, params: StdpParams):
    """STDP kernel for tau = t_post - t_pre (ms); vectorised over ``tau``."""
    tau = np.asarray(tau, dtype=float)
    pos = params.a_plus * np.exp(-np.abs(tau) / params.tau_plus)
    neg = -params.a_minus * np.exp(-np.abs(tau) / params.tau_minus)
    out = np.where(tau > 0, pos, np.where(tau < 0, neg, 0.0))
    return float(out) if out.ndim == 0 else out


def on_spike_event(synapse: Synapse, pair: SpikePair, params: StdpParams) -> Synapse:
    return replace(synapse, c=synapse.c + stdp_window(pair.t_post - pair.t_pre, params))


def decay_eligibility(c, dt: float, params: StdpParams):
    if dt <= 0:
        raise ValueError("dt must be positive")
    return c * math.exp(-dt / params.tau_c)


def consolidate(w, c, modulator, dt: float, w_max: float):
    """Array form of the dopamine-gated weight update."""
    return np.clip(w + c * modulator * dt, 0.0, w_max)


def apply_dopamine(synapse: Synapse, modulator: float, dt: float,
                   params: StdpParams) -> Synapse:
    if not synapse.plastic:
        raise ValueError(f"synapse in group {synapse.group!r} is not plastic")
    w = min(max(synapse.w + synapse.c * modulator * dt, 0.0), params.w_max)
    return replace(synapse, w=w)
