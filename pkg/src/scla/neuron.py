"""Izhikevich neuron dynamics with a fixed 1 ms forward-Euler step.

The membrane update is split into two half-steps for numerical stability;
the recovery variable takes a single full step using the updated potential.
All functions accept scalars or numpy arrays of matching shape.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

SPIKE_THRESHOLD = 30.0  # mV


class NonFiniteStateError(FloatingPointError):
    """Raised when a neuron state becomes NaN or infinite."""


@dataclass(frozen=True)
class NeuronParams:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.d >= 0 and self.c < SPIKE_THRESHOLD):
            raise ValueError(f"invalid Izhikevich parameters: {self}")


@dataclass(frozen=True)
class NeuronState:
    v: float
    u: float
    last_spike_time: Optional[float] = None


class CellKind(enum.Enum):
    REGULAR_SPIKING = "RegularSpiking"
    FAST_SPIKING = "FastSpiking"


_PRESETS = {
    CellKind.REGULAR_SPIKING: NeuronParams(0.02, 0.2, -65.0, 8.0),
    CellKind.FAST_SPIKING: NeuronParams(0.1, 0.2, -65.0, 2.0),
}


def preset(kind) -> NeuronParams:
    """Return the parameter set for ``kind`` (a CellKind or its string value)."""
    try:
        return _PRESETS[CellKind(kind)]
    except ValueError:
        raise ValueError(f"unknown neuron kind: {kind!r}") from None


def _check_finite(*arrays) -> None:
    for x in arrays:
        if not np.all(np.isfinite(x)):
            raise NonFiniteStateError("non-finite neuron state or input")


def membrane_rate(v, u, current):
    return 0.04 * v * v + 5.0 * v + 140.0 - u + current


def derivative(state: NeuronState, params: NeuronParams, current: float):
    """Return (dv/dt, du/dt) at ``state`` for input ``current``."""
    _check_finite(state.v, state.u, current)
    dv = membrane_rate(state.v, state.u, current)
    du = params.a * (params.b * state.v - state.u)
    return dv, du


def integrate(v, u, a, b, c, d, current, dt=1.0):
    """Advance arrays (v, u) by one step; return (v', u', spiked).

    Non-finite values are reported, never clamped.
    """
    half = 0.5 * dt
    v = v + half * membrane_rate(v, u, current)
    v = v + half * membrane_rate(v, u, current)
    u = u + dt * a * (b * v - u)
    _check_finite(v, u)
    spiked = v >= SPIKE_THRESHOLD
    v = np.where(spiked, c, v)
    u = np.where(spiked, u + d, u)
    return v, u, spiked


def step(state: NeuronState, params: NeuronParams, current: float, dt: float = 1.0,
         t: Optional[float] = None):
    """Single-neuron step. ``t`` is the time stamped on a spike, if any."""
    if dt != 1.0:
        raise ValueError("the simulator uses a fixed 1 ms timestep")
    _check_finite(state.v, state.u, current)
    v, u, spiked = integrate(state.v, state.u, params.a, params.b, params.c,
                             params.d, current, dt)
    spiked = bool(spiked)
    last = state.last_spike_time
    if spiked:
        last = t if t is not None else last
    return replace(state, v=float(v), u=float(u), last_spike_time=last), spiked
