"""Markov random walk models: driving chain, step kernels, structural analysis.

A model couples a finite irreducible driving chain (row-stochastic matrix P
over labelled states) with one step kernel per positive-probability edge.
The walk moves M_{k-1} -> M_k according to P and adds an increment X_k drawn
from the kernel attached to the traversed edge; S_k = S_{k-1} + X_k.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidModelError, SolverError

PROB_ATOL = 1e-12
STATIONARY_RESIDUAL = 1e-10


# ---------------------------------------------------------------------------
# Step kernels


@dataclass(frozen=True)
class PointKernel:
    """Deterministic increment."""

    v: float

    def atoms(self):
        return ((self.v, 1.0),)

    def check(self):
        return []


@dataclass(frozen=True)
class LatticeKernel:
    """Finite pmf on the lattice {a*h + c : a integer}."""

    h: float
    c: float
    pmf: tuple  # sorted tuple of (int index, probability)

    def __init__(self, h, c, pmf):
        if isinstance(pmf, dict):
            pmf = tuple(sorted((int(a), float(p)) for a, p in pmf.items()))
        else:
            pmf = tuple(sorted((int(a), float(p)) for a, p in pmf))
        object.__setattr__(self, "h", float(h))
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "pmf", pmf)

    def atoms(self):
        return tuple((a * self.h + self.c, p) for a, p in self.pmf)

    def check(self):
        problems = []
        if not self.h > 0:
            problems.append(f"lattice span {self.h} is not positive")
        if not self.pmf:
            problems.append("lattice kernel has an empty pmf")
        if any(p < 0 for _, p in self.pmf):
            problems.append("lattice pmf has a negative entry")
        total = math.fsum(p for _, p in self.pmf)
        if abs(total - 1.0) > PROB_ATOL:
            problems.append(f"lattice pmf sums to {total!r}, not 1")
        return problems


@dataclass(frozen=True)
class GaussianKernel:
    """Normal increment; only usable through Monte Carlo routines."""

    mean: float
    std: float

    def check(self):
        if not self.std > 0:
            return [f"gaussian stddev {self.std} is not positive"]
        return []


Kernel = PointKernel | LatticeKernel | GaussianKernel


# ---------------------------------------------------------------------------
# Model


class MrwModel:
    """Immutable finite-state Markov random walk model."""

    def __init__(self, states, transition, kernels):
        self.states = tuple(str(s) for s in states)
        P = np.array(transition, dtype=float)
        P.setflags(write=False)
        self.transition = P
        self.kernels = tuple(tuple(row) for row in kernels)
        n = len(self.states)
        if P.shape != (n, n):
            raise InvalidModelError(
                f"transition matrix shape {P.shape} does not match {n} states"
            )
        if len(self.kernels) != n or any(len(row) != n for row in self.kernels):
            raise InvalidModelError("kernel array shape does not match the state count")

    @property
    def num_states(self):
        return len(self.states)

    def state_index(self, state):
        """Resolve a state label (or already-resolved index) to its index."""
        if isinstance(state, (int, np.integer)):
            if not 0 <= state < self.num_states:
                raise KeyError(f"state index {state} out of range")
            return int(state)
        try:
            return self.states.index(str(state))
        except ValueError:
            raise KeyError(f"unknown state label {state!r}") from None

    def live_edges(self):
        """Yield (i, j, p_ij, kernel) over positive-probability edges."""
        for i in range(self.num_states):
            for j in range(self.num_states):
                p = self.transition[i, j]
                if p > 0:
                    yield i, j, p, self.kernels[i][j]

    def __eq__(self, other):
        if not isinstance(other, MrwModel):
            return NotImplemented
        return (
            self.states == other.states
            and np.array_equal(self.transition, other.transition)
            and self.kernels == other.kernels
        )

    def __repr__(self):
        return f"MrwModel(states={self.states!r}, |S|={self.num_states})"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple

    def __bool__(self):
        return self.ok


def _strongly_connected(adj):
    """Strong connectivity of the 0/1 adjacency matrix via forward+backward BFS."""
    n = adj.shape[0]

    def reachable(mat):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.nonzero(mat[u])[0]:
                    if not seen[v]:
                        seen[v] = True
                        nxt.append(int(v))
            frontier = nxt
        return seen

    return bool(reachable(adj).all() and reachable(adj.T).all())


def validate_model(m: MrwModel) -> ValidationReport:
    """Check stochasticity, irreducibility, and kernel well-formedness."""
    problems = []
    P = m.transition
    if np.any(P < -PROB_ATOL) or np.any(P > 1 + PROB_ATOL):
        problems.append("transition entries outside [0, 1]")
    for i, row_sum in enumerate(P.sum(axis=1)):
        if abs(row_sum - 1.0) > PROB_ATOL:
            problems.append(f"row {m.states[i]!r} sum {row_sum!r}")
    adj = P > 0
    if not _strongly_connected(adj):
        problems.append("transition graph not strongly connected")
    for i, j, _, kernel in m.live_edges():
        edge = f"({m.states[i]!r} -> {m.states[j]!r})"
        if kernel is None:
            problems.append(f"missing kernel on live edge {edge}")
            continue
        for msg in kernel.check():
            problems.append(f"kernel on edge {edge}: {msg}")
    return ValidationReport(ok=not problems, problems=tuple(problems))


def require_valid(m: MrwModel):
    report = validate_model(m)
    if not report.ok:
        raise InvalidModelError("; ".join(report.problems))


# ---------------------------------------------------------------------------
# Stationary distribution, period, dual


def stationary_distribution(m: MrwModel, max_iter=1_000_000) -> np.ndarray:
    """Stationary row vector pi with pi P = pi, sum 1.

    Direct linear solve for the usual small systems, with power iteration as
    a fallback; the returned vector always satisfies the 1e-10 residual bound.
    """
    P = m.transition
    n = m.num_states
    pi = None
    if n <= 64:
        A = P.T - np.eye(n)
        A[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        try:
            candidate = np.linalg.solve(A, b)
            if np.all(candidate > 0):
                pi = candidate / candidate.sum()
        except np.linalg.LinAlgError:
            pi = None
    if pi is None or np.max(np.abs(pi @ P - pi)) > 1e-12:
        pi = np.full(n, 1.0 / n)
        for _ in range(max_iter):
            nxt = pi @ P
            if np.max(np.abs(nxt - pi)) <= 1e-14:
                pi = nxt
                break
            pi = nxt
        pi = pi / pi.sum()
    if np.max(np.abs(pi @ P - pi)) > STATIONARY_RESIDUAL:
        raise SolverError("stationary distribution solver did not converge")
    return pi


@dataclass(frozen=True)
class Periodicity:
    d: int
    classes: tuple  # tuple of frozensets of state labels, indexed by residue


def period(m: MrwModel) -> Periodicity:
    """Period d (gcd of cycle lengths through state 0) and the cyclic classes."""
    P = m.transition
    n = m.num_states
    level = np.full(n, -1)
    level[0] = 0
    frontier = [0]
    d = 0
    edges = [(i, j) for i in range(n) for j in range(n) if P[i, j] > 0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in range(n):
                if P[u, v] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    for u, v in edges:
        d = math.gcd(d, level[u] + 1 - level[v])
    d = max(d, 1)
    classes = [set() for _ in range(d)]
    for s in range(n):
        classes[level[s] % d].add(m.states[s])
    return Periodicity(d=d, classes=tuple(frozenset(c) for c in classes))


def _transpose_kernel_grid(kernels):
    n = len(kernels)
    return tuple(tuple(kernels[j][i] for j in range(n)) for i in range(n))


def dual(m: MrwModel) -> MrwModel:
    """Time reversal: dual p_ij = pi_j p_ji / pi_i and transposed kernels."""
    require_valid(m)
    pi = stationary_distribution(m)
    P = m.transition
    dual_P = (pi[None, :] * P.T) / pi[:, None]
    return MrwModel(m.states, dual_P, _transpose_kernel_grid(m.kernels))


# ---------------------------------------------------------------------------
# Null-homologous test


@dataclass(frozen=True)
class NullHomology:
    is_null: bool
    potential: dict | None  # state label -> g value, g(first state) = 0
    reason: str | None


def is_null_homologous(m: MrwModel) -> NullHomology:
    """Decide whether every increment is forced to g(M_k) - g(M_{k-1}).

    Requires all live-edge kernels to be point masses whose values are
    consistent along every cycle (within 1e-12).
    """
    require_valid(m)
    values = {}
    for i, j, _, kernel in m.live_edges():
        if not isinstance(kernel, PointKernel):
            return NullHomology(
                False,
                None,
                f"kernel on edge ({m.states[i]!r} -> {m.states[j]!r}) "
                "is not a point mass",
            )
        values[(i, j)] = kernel.v
    n = m.num_states
    g = np.full(n, np.nan)
    g[0] = 0.0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in range(n):
                if m.transition[u, v] > 0 and np.isnan(g[v]):
                    g[v] = g[u] + values[(u, v)]
                    nxt.append(v)
        frontier = nxt
    for (i, j), v in values.items():
        gap = g[i] + v - g[j]
        if abs(gap) > 1e-12:
            return NullHomology(
                False,
                None,
                f"cycle through edge ({m.states[i]!r} -> {m.states[j]!r}) "
                f"has increment sum {gap!r}",
            )
    potential = {m.states[s]: float(g[s]) for s in range(n)}
    return NullHomology(True, potential, None)


# ---------------------------------------------------------------------------
# JSON model files


def _kernel_to_json(kernel):
    if kernel is None:
        return None
    if isinstance(kernel, PointKernel):
        return {"type": "point", "v": kernel.v}
    if isinstance(kernel, LatticeKernel):
        return {
            "type": "lattice",
            "h": kernel.h,
            "c": kernel.c,
            "pmf": {str(a): p for a, p in kernel.pmf},
        }
    if isinstance(kernel, GaussianKernel):
        return {"type": "gaussian", "mean": kernel.mean, "std": kernel.std}
    raise TypeError(f"unknown kernel {kernel!r}")


def _kernel_from_json(obj):
    if obj is None:
        return None
    kind = obj.get("type")
    if kind == "point":
        return PointKernel(float(obj["v"]))
    if kind == "lattice":
        return LatticeKernel(obj["h"], obj["c"], {int(a): p for a, p in obj["pmf"].items()})
    if kind == "gaussian":
        return GaussianKernel(float(obj["mean"]), float(obj["std"]))
    raise ValueError(f"unknown kernel type {kind!r}")


def model_to_json(m: MrwModel) -> dict:
    return {
        "states": list(m.states),
        "P": m.transition.tolist(),
        "kernels": [[_kernel_to_json(k) for k in row] for row in m.kernels],
    }


def model_from_json(obj: dict) -> MrwModel:
    P = obj["P"]
    for row in P:
        for p in row:
            if not math.isfinite(float(p)):
                raise ValueError("transition matrix contains a non-finite entry")
    kernels = [[_kernel_from_json(k) for k in row] for row in obj["kernels"]]
    return MrwModel(obj["states"], P, kernels)


def load_model(path) -> MrwModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


def dump_model(m: MrwModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(m), fh, indent=2)
        fh.write("\n")
