"""Compiled decision-window loop.

Mirrors ``Network.advance`` step for step (same update order); the numpy
path stays as the reference implementation and the tests compare the two.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

SPIKE_THRESHOLD = 30.0


def csr(keys: np.ndarray, n: int):
    """Return (indptr, order) grouping synapse ids by ``keys``."""
    order = np.argsort(keys, kind="stable").astype(np.intp)
    indptr = np.zeros(n + 1, dtype=np.intp)
    np.cumsum(np.bincount(keys, minlength=n), out=indptr[1:])
    return indptr, order


@njit(cache=True)
def run_window(v, u, a, b, c_reset, d, last_spike, pending,
               pre, post, w, c, group_size, dopamine,
               out_ptr, out_ids, in_ptr, in_ids,
               inh_ptr, inh_post, inh_w,
               clock, duration, noise_targets, i_noise, sense_lo, sense_hi, i_sense,
               a_plus, a_minus, tau_plus, tau_minus, c_decay, d_decay, w_max, dt,
               motor_lo, motor_size, counts):
    """Run ``duration`` ms in place. Returns the number of spikes, or -1 on a
    non-finite state (the offending time is then ``clock + step``)."""
    n = v.size
    n_syn = w.size
    n_groups = dopamine.size
    drive = np.empty(n)
    nxt = np.empty(n)
    fired = np.empty(n, dtype=np.intp)
    total = 0
    half = 0.5 * dt
    for step in range(duration):
        t = clock + step
        for i in range(n):
            drive[i] = pending[i]
        if i_noise > 0.0:
            drive[noise_targets[step]] += i_noise
        if i_sense > 0.0:
            for i in range(sense_lo, sense_hi):
                drive[i] += i_sense

        n_fired = 0
        for i in range(n):
            vi = v[i]
            ui = u[i]
            cur = drive[i]
            vi += half * (0.04 * vi * vi + 5.0 * vi + 140.0 - ui + cur)
            vi += half * (0.04 * vi * vi + 5.0 * vi + 140.0 - ui + cur)
            ui += dt * a[i] * (b[i] * vi - ui)
            if not (math.isfinite(vi) and math.isfinite(ui)):
                return -1 - step
            if vi >= SPIKE_THRESHOLD:
                vi = c_reset[i]
                ui += d[i]
                fired[n_fired] = i
                n_fired += 1
            v[i] = vi
            u[i] = ui

        for i in range(n):
            nxt[i] = 0.0
        for k in range(n_fired):
            last_spike[fired[k]] = t
        for k in range(n_fired):
            j = fired[k]
            # j as presynaptic: depression against the latest post spike
            for q in range(out_ptr[j], out_ptr[j + 1]):
                s = out_ids[q]
                lag = t - last_spike[post[s]]
                if lag > 0.0:
                    c[s] -= a_minus * math.exp(-lag / tau_minus)
                nxt[post[s]] += w[s]
            # j as postsynaptic: potentiation against the latest pre spike
            for q in range(in_ptr[j], in_ptr[j + 1]):
                s = in_ids[q]
                lag = t - last_spike[pre[s]]
                if lag > 0.0:
                    c[s] += a_plus * math.exp(-lag / tau_plus)
            for q in range(inh_ptr[j], inh_ptr[j + 1]):
                nxt[inh_post[q]] += inh_w[q]
            m = j - motor_lo
            if 0 <= m < 4 * motor_size:
                counts[m // motor_size] += 1
        total += n_fired
        for i in range(n):
            pending[i] = nxt[i]

        any_da = False
        for g in range(n_groups):
            dopamine[g] *= d_decay
            if dopamine[g] != 0.0:
                any_da = True
        if any_da:
            for g in range(n_groups):
                gain = dopamine[g] * dt
                for s in range(g * group_size, (g + 1) * group_size):
                    cs = c[s] * c_decay
                    c[s] = cs
                    w[s] = min(max(w[s] + cs * gain, 0.0), w_max)
        else:
            for s in range(n_syn):
                c[s] *= c_decay
    return total
