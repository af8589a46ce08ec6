"""The 1000-neuron, two-layer sensory/motor network.

Neuron indices are 0-based internally; ``POPULATIONS`` keeps the 1-based
inclusive ranges used in the documentation (SU = 1..100 and so on).
Plastic synapses are stored group-contiguous so that per-group dopamine
can be broadcast with a reshape instead of a gather.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import ConfigError, ExperimentConfig
from .directions import Direction
from ._kernel import csr, run_window
from .neuron import CellKind, NonFiniteStateError, integrate, preset

N_NEURONS = 1000
N_EXCITATORY = 800

# role -> direction -> 1-based inclusive index range
POPULATIONS = {
    "S": {Direction.UP: (1, 100), Direction.DOWN: (101, 200),
          Direction.LEFT: (201, 300), Direction.RIGHT: (301, 400)},
    "M": {Direction.UP: (401, 500), Direction.DOWN: (501, 600),
          Direction.LEFT: (601, 700), Direction.RIGHT: (701, 800)},
    "I": {Direction.UP: (801, 850), Direction.DOWN: (851, 900),
          Direction.LEFT: (901, 950), Direction.RIGHT: (951, 1000)},
}


def population(role: str, direction: Direction) -> slice:
    """0-based slice for a (role, direction) population."""
    first, last = POPULATIONS[role][Direction(direction)]
    return slice(first - 1, last)


@dataclass(frozen=True)
class ConnectionGroup:
    label: str
    sensory: Direction
    motor: Direction

    @property
    def correct(self) -> bool:
        return self.sensory == self.motor


def _group(s: Direction, m: Direction) -> ConnectionGroup:
    return ConnectionGroup(f"S{s.letter}toM{m.letter}", s, m)


U, D, L, R = Direction
GROUPS = (
    _group(U, U), _group(U, D), _group(D, U), _group(D, D),
    _group(L, L), _group(L, R), _group(R, R), _group(R, L),
)
GROUP_LABELS = tuple(g.label for g in GROUPS)
GROUP_INDEX = {(g.sensory, g.motor): i for i, g in enumerate(GROUPS)}


def group_index(group) -> int:
    """Index of a group given as ConnectionGroup, label or (sensory, motor) pair."""
    if isinstance(group, ConnectionGroup):
        group = group.label
    if isinstance(group, str):
        try:
            return GROUP_LABELS.index(group)
        except ValueError:
            raise ValueError(f"unknown connection group {group!r}") from None
    s, m = group
    try:
        return GROUP_INDEX[(Direction(s), Direction(m))]
    except KeyError:
        raise ValueError(f"no plastic group for {group!r}") from None


class Network:
    """Neuron state, synapses and per-group dopamine for one simulation."""

    def __init__(self, config: ExperimentConfig, rng: np.random.Generator,
                 plastic_pre, plastic_post, inh_pre, inh_post):
        self.config = config
        self.stdp = config.stdp
        self.rng = rng  # noise stream

        rs, fs = preset(CellKind.REGULAR_SPIKING), preset(CellKind.FAST_SPIKING)
        excit = np.arange(N_NEURONS) < N_EXCITATORY
        self.a = np.where(excit, rs.a, fs.a)
        self.b = np.where(excit, rs.b, fs.b)
        self.c_reset = np.where(excit, rs.c, fs.c)
        self.d = np.where(excit, rs.d, fs.d)
        # rest state is the stable fixed point v = -70, u = b*v
        self.v = np.full(N_NEURONS, -70.0)
        self.u = self.b * self.v
        self.last_spike = np.full(N_NEURONS, -np.inf)

        self.pre = np.asarray(plastic_pre, dtype=np.intp)
        self.post = np.asarray(plastic_post, dtype=np.intp)
        n_plastic = self.pre.size
        if n_plastic % len(GROUPS):
            raise ValueError("plastic synapses must split evenly over the 8 groups")
        self.group = np.repeat(np.arange(len(GROUPS)), n_plastic // len(GROUPS))
        self.w = np.full(n_plastic, float(config.w_init))
        self.c = np.zeros(n_plastic)
        self.inh_pre = np.asarray(inh_pre, dtype=np.intp)
        self.inh_post = np.asarray(inh_post, dtype=np.intp)
        self.inh_w = np.full(self.inh_pre.size, -1.0)

        self.dopamine = np.zeros(len(GROUPS))
        self.clock = 0  # ms
        self.current = np.zeros(N_NEURONS)  # external drive for the coming ms
        self.pending = np.zeros(N_NEURONS)  # synaptic input arriving next ms
        self.spike_count = 0

        self._c_decay = np.exp(-config.dt / self.stdp.tau_c)
        self._d_decay = np.exp(-config.dt / self.stdp.tau_d)
        self._motor = [population("M", d) for d in Direction]
        self._out = csr(self.pre, N_NEURONS)
        self._in = csr(self.post, N_NEURONS)
        order = np.argsort(self.inh_pre, kind="stable")
        self.inh_pre, self.inh_post = self.inh_pre[order], self.inh_post[order]
        self.inh_w = self.inh_w[order]
        self._inh_ptr = csr(self.inh_pre, N_NEURONS)[0]

    # -- inputs -----------------------------------------------------------
    def inject_sensory(self, sensed: Direction, amplitude: float) -> None:
        if amplitude < 0:
            raise ValueError("sensory amplitude must be >= 0")
        self.current[population("S", sensed)] += amplitude

    def inject_noise(self) -> int:
        """Pulse one uniformly chosen excitatory neuron; returns its index."""
        target = int(self.rng.integers(N_EXCITATORY))
        self.current[target] += self.config.i_noise
        return target

    # -- dynamics ---------------------------------------------------------
    def advance(self) -> np.ndarray:
        """Advance every neuron one ms; returns the boolean spike vector."""
        dt = self.config.dt
        drive = self.current + self.pending
        try:
            self.v, self.u, spiked = integrate(self.v, self.u, self.a, self.b,
                                               self.c_reset, self.d, drive, dt)
        except NonFiniteStateError as exc:
            raise NonFiniteStateError(f"non-finite neuron state at t={self.clock} ms") from exc
        t = self.clock
        self.current = np.zeros(N_NEURONS)

        if spiked.any():
            self.last_spike[spiked] = t
            self._record_stdp(spiked, t)
            self.spike_count += int(spiked.sum())
            self.pending = self._deliver(spiked)
        else:
            self.pending = np.zeros(N_NEURONS)

        self.c *= self._c_decay
        self.dopamine *= self._d_decay
        if self.dopamine.any():
            w = self.w.reshape(len(GROUPS), -1)
            c = self.c.reshape(len(GROUPS), -1)
            w += c * self.dopamine[:, None] * dt
            np.clip(self.w, 0.0, self.stdp.w_max, out=self.w)
        self.clock += 1
        return spiked

    def _record_stdp(self, spiked: np.ndarray, t: int) -> None:
        # nearest-neighbour pairing against the most recent earlier spike
        p = self.stdp
        # spike times of this ms are already stamped, so simultaneous pairs
        # have zero lag and contribute nothing
        post_hit = np.flatnonzero(spiked[self.post])
        if post_hit.size:
            lag = t - self.last_spike[self.pre[post_hit]]
            self.c[post_hit] += np.where(lag > 0, p.a_plus * np.exp(-lag / p.tau_plus), 0.0)
        pre_hit = np.flatnonzero(spiked[self.pre])
        if pre_hit.size:
            lag = t - self.last_spike[self.post[pre_hit]]
            self.c[pre_hit] -= np.where(lag > 0, p.a_minus * np.exp(-lag / p.tau_minus), 0.0)

    def _deliver(self, spiked: np.ndarray) -> np.ndarray:
        active = spiked[self.pre]
        out = np.bincount(self.post[active], weights=self.w[active], minlength=N_NEURONS)
        inh_active = spiked[self.inh_pre]
        if inh_active.any():
            out += np.bincount(self.inh_post[inh_active], weights=self.inh_w[inh_active],
                               minlength=N_NEURONS)
        return out

    def motor_counts(self, spiked: np.ndarray) -> np.ndarray:
        return np.array([np.count_nonzero(spiked[s]) for s in self._motor])

    def run_compiled(self, duration, targets, i_noise, sensed, i_sense) -> np.ndarray:
        p = self.stdp
        lo, hi = (0, 0) if sensed is None else (population("S", sensed).start,
                                                 population("S", sensed).stop)
        self.pending += self.current
        self.current = np.zeros(N_NEURONS)
        counts = np.zeros(4, dtype=np.int64)
        n = run_window(
            self.v, self.u, self.a, self.b, self.c_reset, self.d, self.last_spike,
            self.pending, self.pre, self.post, self.w, self.c,
            self.w.size // len(GROUPS), self.dopamine,
            self._out[0], self._out[1], self._in[0], self._in[1],
            self._inh_ptr, self.inh_post, self.inh_w,
            float(self.clock), duration, np.asarray(targets, dtype=np.intp),
            float(i_noise), lo, hi, float(i_sense),
            p.a_plus, p.a_minus, p.tau_plus, p.tau_minus,
            float(self._c_decay), float(self._d_decay), p.w_max, self.config.dt,
            population("M", Direction.UP).start, 100, counts)
        if n < 0:
            raise NonFiniteStateError(f"non-finite neuron state at t={self.clock - 1 - n} ms")
        self.clock += duration
        self.spike_count += n
        return counts

    # -- queries ----------------------------------------------------------
    def group_mean_weight(self, group) -> float:
        return float(self.w.reshape(len(GROUPS), -1)[group_index(group)].mean())

    def group_mean_weights(self) -> np.ndarray:
        return self.w.reshape(len(GROUPS), -1).mean(axis=1)

    def group_slice(self, group) -> slice:
        per = self.w.size // len(GROUPS)
        i = group_index(group)
        return slice(i * per, (i + 1) * per)


def build_topology(seed, config: ExperimentConfig, noise_rng: Optional[np.random.Generator] = None) -> Network:
    """Wire the network; a pure function of (seed, config).

    Each sensory neuron makes ``k_out`` synapses into each of its two
    same-axis motor populations; each inhibitory neuron makes ``k_inh``
    fixed synapses into the motor population of its own direction.
    """
    pop_size = 100
    if config.k_out < 1 or config.k_out > pop_size:
        raise ConfigError(f"k_out must lie in 1..{pop_size}, got {config.k_out}")
    if config.k_inh > pop_size:
        raise ConfigError(f"k_inh must lie in 0..{pop_size}, got {config.k_inh}")
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    wiring_rng, default_noise = (np.random.default_rng(s) for s in seq.spawn(2))

    def fan_out(n_src, k):
        # uniform k-subsets without replacement, one row per source neuron
        return np.argsort(wiring_rng.random((n_src, pop_size)), axis=1)[:, :k]

    pre, post = [], []
    for g in GROUPS:
        src, dst = population("S", g.sensory), population("M", g.motor)
        targets = fan_out(pop_size, config.k_out) + dst.start
        pre.append(np.repeat(np.arange(src.start, src.stop), config.k_out))
        post.append(targets.ravel())
    inh_pre, inh_post = [], []
    for d in Direction:
        src, dst = population("I", d), population("M", d)
        n_src = src.stop - src.start
        targets = fan_out(n_src, config.k_inh) + dst.start
        inh_pre.append(np.repeat(np.arange(src.start, src.stop), config.k_inh))
        inh_post.append(targets.ravel())
    return Network(config, noise_rng if noise_rng is not None else default_noise,
                   np.concatenate(pre), np.concatenate(post),
                   np.concatenate(inh_pre), np.concatenate(inh_post))


def inject_sensory(network: Network, sensed: Direction, amplitude: float) -> Network:
    network.inject_sensory(sensed, amplitude)
    return network


def inject_noise(network: Network) -> Network:
    network.inject_noise()
    return network


def simulate_window(network: Network, duration: int, sensed: Optional[Direction] = None,
                    noise: bool = True, compiled: bool = True):
    """Run ``duration`` ms with per-ms noise and optional sensory drive.

    Returns (network, motor spike counts ordered Up, Down, Left, Right).
    ``compiled=False`` runs the pure numpy reference path instead of the
    compiled kernel; both consume the noise stream identically.
    """
    if duration < 1:
        raise ValueError("window must be at least 1 ms")
    cfg = network.config
    i_noise = cfg.i_noise if noise else 0.0
    # one draw per ms, taken up front so both paths see the same targets
    targets = (network.rng.integers(N_EXCITATORY, size=duration) if i_noise > 0
               else np.zeros(duration, dtype=np.intp))
    i_sense = cfg.i_sense if sensed is not None else 0.0
    if not compiled:
        counts = np.zeros(4, dtype=np.int64)
        for ms in range(duration):
            if i_noise > 0:
                network.current[targets[ms]] += i_noise
            if i_sense > 0:
                network.inject_sensory(sensed, i_sense)
            counts += network.motor_counts(network.advance())
        return network, counts
    return network, network.run_compiled(duration, targets, i_noise, sensed, i_sense)


def group_mean_weight(network: Network, group) -> float:
    return network.group_mean_weight(group)
