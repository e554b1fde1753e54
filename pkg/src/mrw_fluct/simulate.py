"""Seeded trajectory generation.

Randomness comes from counter-based Philox streams, so a trajectory is a
pure function of (model, start state, length, seed).  Each step consumes
exactly two uniforms: one for the driving-chain transition, one for the
increment (inverse-CDF for lattice kernels, normal quantile for Gaussian).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .model import GaussianKernel, LatticeKernel, MrwModel, PointKernel, require_valid


@dataclass(frozen=True)
class Trajectory:
    """States M_0..M_n (as indices), increments X_1..X_n, sums S_0..S_n."""

    model: MrwModel
    states: np.ndarray
    increments: np.ndarray
    sums: np.ndarray

    @property
    def length(self):
        return len(self.increments)

    def state_labels(self):
        return tuple(self.model.states[s] for s in self.states)


def transition_cdf(m: MrwModel) -> np.ndarray:
    """Row-wise transition CDF with the last column pinned to exactly 1."""
    cum = np.cumsum(m.transition, axis=1)
    cum[:, -1] = 1.0
    return cum


def _edge_samplers(m: MrwModel):
    """Map edge -> callable(uniform array) -> increments."""
    samplers = {}
    for i, j, _, kernel in m.live_edges():
        if isinstance(kernel, PointKernel):
            v = kernel.v
            samplers[(i, j)] = lambda u, v=v: np.full(u.shape, v)
        elif isinstance(kernel, LatticeKernel):
            values = np.array([a * kernel.h + kernel.c for a, _ in kernel.pmf])
            cum = np.cumsum([p for _, p in kernel.pmf])
            cum[-1] = 1.0
            samplers[(i, j)] = lambda u, values=values, cum=cum: values[
                np.minimum(np.searchsorted(cum, u, side="right"), len(values) - 1)
            ]
        elif isinstance(kernel, GaussianKernel):
            mean, std = kernel.mean, kernel.std
            samplers[(i, j)] = lambda u, mean=mean, std=std: mean + std * ndtri(u)
        else:
            raise TypeError(f"unknown kernel {kernel!r}")
    return samplers


def simulate(m: MrwModel, i0, n: int, seed: int) -> Trajectory:
    """Sample an n-step trajectory started at state i0, deterministically per seed."""
    require_valid(m)
    if n < 0:
        raise ValueError("trajectory length must be nonnegative")
    start = m.state_index(i0)
    cum = transition_cdf(m)
    samplers = _edge_samplers(m)

    states = np.empty(n + 1, dtype=np.int64)
    increments = np.empty(n, dtype=float)
    states[0] = start
    if n > 0:
        gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        u = gen.random((n, 2))
        cur = start
        for k in range(n):
            nxt = int(np.searchsorted(cum[cur], u[k, 0], side="right"))
            nxt = min(nxt, m.num_states - 1)
            increments[k] = samplers[(cur, nxt)](np.array([u[k, 1]]))[0]
            states[k + 1] = nxt
            cur = nxt
    sums = np.concatenate([[0.0], np.cumsum(increments)])
    return Trajectory(model=m, states=states, increments=increments, sums=sums)
