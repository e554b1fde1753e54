"""Monte Carlo estimators and trajectory statistics.

All estimators run a vectorized path engine whose randomness is a pure
function of (seed, step); results are bit-identical across reruns with the
same (model, parameters, seed).  Quantities measured at driving-chain
returns use a cycle horizon ("n cycles"); path quantities use a step
horizon ("n steps").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimatorBudgetError
from .exact import prob_positive_curve
from .lattice import is_lattice_exact
from .model import MrwModel, require_valid, stationary_distribution
from .simulate import Trajectory, _edge_samplers, transition_cdf

EXACT_STEP_CAP = 4096


@dataclass(frozen=True)
class EstimatorResult:
    estimate: float
    stderr: float
    paths: int
    seed: int
    exact: bool = False
    capped: int = 0

    def to_json(self):
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "paths": self.paths,
            "seed": self.seed,
            "exact": self.exact,
        }


def _mean_result(values: np.ndarray, seed: int, capped: int = 0) -> EstimatorResult:
    paths = len(values)
    est = float(values.mean()) if paths else float("nan")
    if paths > 1:
        stderr = float(values.std(ddof=1) / math.sqrt(paths))
    else:
        stderr = 0.0
    return EstimatorResult(est, stderr, paths, seed, exact=False, capped=capped)


class PathEngine:
    """Steps `paths` independent trajectories in lockstep.

    Uniforms are drawn in fixed-size chunks from Philox streams keyed by
    (seed, chunk index); two uniforms per path per step, exactly as the
    single-trajectory simulator consumes them.
    """

    def __init__(self, m: MrwModel, i0, paths: int, seed: int, chunk: int = 128):
        self.model = m
        self.paths = paths
        self.seed = int(seed)
        self.chunk = chunk
        self.cum = transition_cdf(m)
        self.samplers = sorted(_edge_samplers(m).items())
        self.single_state = m.num_states == 1
        self.state = np.full(paths, m.state_index(i0), dtype=np.int64)
        self.S = np.zeros(paths)
        self.t = 0
        self._buf = None
        self._pos = chunk
        self._chunk_index = 0

    def _refill(self):
        key = np.array([self.seed, self._chunk_index], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key))
        self._buf = gen.random((2, self.chunk, self.paths))
        self._chunk_index += 1
        self._pos = 0

    def step(self):
        """Advance every path one step; returns the new state array."""
        if self._pos >= self.chunk:
            self._refill()
        u1 = self._buf[0, self._pos]
        u2 = self._buf[1, self._pos]
        self._pos += 1
        if self.single_state:
            nxt = self.state
            x = self.samplers[0][1](u2)
        else:
            rows = self.cum[self.state]
            nxt = (rows < u1[:, None]).sum(axis=1)
            x = np.empty(self.paths)
            for (i, j), sampler in self.samplers:
                mask = (self.state == i) & (nxt == j)
                if mask.any():
                    x[mask] = sampler(u2[mask])
        self.S = self.S + x
        self.state = nxt
        self.t += 1
        return self.state


# ---------------------------------------------------------------------------
# Return/excursion structure of a single trajectory


@dataclass(frozen=True)
class ReturnStructure:
    """Returns of the driving chain to a reference state along one path.

    tau are the return epochs, chi the sojourns, s_at_returns the embedded
    walk S_{tau_k(i)}; depth/height are the maximal negative/positive
    deviations of S within each completed excursion, relative to its start.
    """

    state: str
    length: int
    tau: np.ndarray
    chi: np.ndarray
    s_at_returns: np.ndarray
    depth: np.ndarray
    height: np.ndarray

    @property
    def num_returns(self) -> int:
        """Lambda(n): completed returns by time `length`."""
        return len(self.tau)


def extract_returns(t: Trajectory, i) -> ReturnStructure:
    """Single-pass extraction of return epochs, sojourns and excursion extremes."""
    i_idx = t.model.state_index(i)
    tau = np.nonzero(t.states[1:] == i_idx)[0] + 1
    chi = np.diff(tau, prepend=0)
    s_at_returns = t.sums[tau]
    depth = np.empty(len(tau))
    height = np.empty(len(tau))
    prev = 0
    for k, epoch in enumerate(tau):
        rel = t.sums[prev + 1 : epoch + 1] - t.sums[prev]
        depth[k] = max(0.0, float(-rel.min())) if len(rel) else 0.0
        height[k] = max(0.0, float(rel.max())) if len(rel) else 0.0
        prev = epoch
    return ReturnStructure(
        state=t.model.states[i_idx],
        length=t.length,
        tau=tau,
        chi=chi,
        s_at_returns=s_at_returns,
        depth=depth,
        height=height,
    )


# ---------------------------------------------------------------------------
# Step-horizon estimators


def spitzer_average(
    m: MrwModel, i, n: int, paths: int, seed: int, use_exact: bool = True
) -> EstimatorResult:
    """(1/n) sum_{k<=n} P_i(S_k > 0); exact via the lattice DP when possible."""
    require_valid(m)
    if use_exact and n <= EXACT_STEP_CAP and is_lattice_exact(m):
        curve = prob_positive_curve(m, i, n)
        return EstimatorResult(float(curve.mean()), 0.0, 0, seed, exact=True)
    fracs = occupation_fraction_samples(m, i, n, paths, seed)
    return _mean_result(fracs, seed)


def occupation_fraction_samples(
    m: MrwModel, i0, n: int, paths: int, seed: int
) -> np.ndarray:
    """One N_n^>/n sample per path."""
    require_valid(m)
    engine = PathEngine(m, i0, paths, seed)
    counts = np.zeros(paths)
    for _ in range(n):
        engine.step()
        counts += engine.S > 0
    return counts / n if n > 0 else counts


def strong_spitzer_curve(
    m: MrwModel, i, n_grid, paths: int, seed: int, use_exact: bool = True
):
    """P_i(S_n > 0) estimates at each n in the grid."""
    require_valid(m)
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        return []
    top = max(n_grid)
    if use_exact and top <= EXACT_STEP_CAP and is_lattice_exact(m):
        curve = prob_positive_curve(m, i, top)
        return [
            EstimatorResult(float(curve[n - 1]), 0.0, 0, seed, exact=True)
            for n in n_grid
        ]
    engine = PathEngine(m, i, paths, seed)
    wanted = {n: None for n in sorted(set(n_grid))}
    for t in range(1, top + 1):
        engine.step()
        if t in wanted:
            p_hat = float((engine.S > 0).mean())
            se = math.sqrt(max(p_hat * (1 - p_hat), 0.0) / paths) if paths else 0.0
            wanted[t] = EstimatorResult(p_hat, se, paths, seed)
    return [wanted[n] for n in n_grid]


def clt_check(m: MrwModel, i0, n: int, paths: int, seed: int):
    """Normalized terminal sums S_n / sqrt(n) plus the cycle-variance
    estimate pi_i * mean(S over one return cycle squared)."""
    require_valid(m)
    pi = stationary_distribution(m)
    i_idx = m.state_index(i0)
    engine = PathEngine(m, i0, paths, seed)
    cycle_start = np.zeros(paths)
    total_sq = 0.0
    total_cycles = 0
    for _ in range(n):
        engine.step()
        at_i = engine.state == i_idx
        if at_i.any():
            cyc = engine.S[at_i] - cycle_start[at_i]
            total_sq += float(np.sum(cyc * cyc))
            total_cycles += int(at_i.sum())
            cycle_start[at_i] = engine.S[at_i]
    samples = engine.S / math.sqrt(n) if n > 0 else engine.S.copy()
    theta_sq = (
        float(pi[i_idx] * total_sq / total_cycles) if total_cycles else float("nan")
    )
    return samples, theta_sq


# ---------------------------------------------------------------------------
# Cycle-horizon estimators


def _default_step_cap(m: MrwModel, i_idx: int, n_cycles: int) -> int:
    pi = stationary_distribution(m)
    return max(int(1000 * n_cycles / pi[i_idx]), 1000)


def embedded_spitzer_average(
    m: MrwModel,
    i,
    n: int,
    paths: int,
    seed: int,
    step_cap: int | None = None,
    cap_budget: float = 0.001,
) -> EstimatorResult:
    """(1/n) sum_{k<=n} P_i(S_{tau_k(i)} > 0) over n return cycles per path."""
    require_valid(m)
    i_idx = m.state_index(i)
    if step_cap is None:
        step_cap = _default_step_cap(m, i_idx, n)
    engine = PathEngine(m, i, paths, seed)
    cycles = np.zeros(paths, dtype=np.int64)
    positive = np.zeros(paths)
    while cycles.min(initial=n) < n and engine.t < step_cap:
        engine.step()
        active = (engine.state == i_idx) & (cycles < n)
        if active.any():
            positive[active] += engine.S[active] > 0
            cycles[active] += 1
    capped = int((cycles < n).sum())
    if paths and capped / paths > cap_budget:
        raise EstimatorBudgetError(
            f"{capped}/{paths} paths failed to reach {n} returns within "
            f"{step_cap} steps"
        )
    done = cycles >= n
    return _mean_result(positive[done] / n, seed, capped=capped)


@dataclass(frozen=True)
class BoundaryOccupation:
    """E_i L_n^i estimate with its two straddling-cycle components."""

    total: EstimatorResult
    above: EstimatorResult  # cycles starting in (0, depth]
    below: EstimatorResult  # cycles starting in (-height, 0]


def boundary_occupation(
    m: MrwModel,
    i,
    n: int,
    paths: int,
    seed: int,
    step_cap: int | None = None,
    cap_budget: float = 0.001,
) -> BoundaryOccupation:
    """Time fraction spent in cycles that straddle the zero level, over n
    return cycles per path."""
    require_valid(m)
    i_idx = m.state_index(i)
    if step_cap is None:
        step_cap = _default_step_cap(m, i_idx, n)
    engine = PathEngine(m, i, paths, seed)
    cycles = np.zeros(paths, dtype=np.int64)
    start_level = np.zeros(paths)
    start_time = np.zeros(paths, dtype=np.int64)
    depth = np.zeros(paths)
    height = np.zeros(paths)
    acc_above = np.zeros(paths)
    acc_below = np.zeros(paths)
    while cycles.min(initial=n) < n and engine.t < step_cap:
        engine.step()
        open_mask = cycles < n
        dev = engine.S - start_level
        np.maximum(depth, np.where(open_mask, -dev, 0.0), out=depth)
        np.maximum(height, np.where(open_mask, dev, 0.0), out=height)
        closing = (engine.state == i_idx) & open_mask
        if closing.any():
            chi = (engine.t - start_time[closing]).astype(float)
            s0 = start_level[closing]
            above = (s0 > 0) & (s0 <= depth[closing])
            below = (s0 <= 0) & (s0 > -height[closing])
            acc_above[closing] += chi * above
            acc_below[closing] += chi * below
            cycles[closing] += 1
            start_level[closing] = engine.S[closing]
            start_time[closing] = engine.t
            depth[closing] = 0.0
            height[closing] = 0.0
    capped = int((cycles < n).sum())
    if paths and capped / paths > cap_budget:
        raise EstimatorBudgetError(
            f"{capped}/{paths} paths failed to reach {n} returns within "
            f"{step_cap} steps"
        )
    done = cycles >= n
    above = _mean_result(acc_above[done] / n, seed, capped=capped)
    below = _mean_result(acc_below[done] / n, seed, capped=capped)
    total = _mean_result((acc_above[done] + acc_below[done]) / n, seed, capped=capped)
    return BoundaryOccupation(total=total, above=above, below=below)
