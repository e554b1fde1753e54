"""Exact distribution computations for lattice-compatible models.

Forward dynamic programming over (state, lattice index) yields the joint law
of (M_n, S_n), optionally extended with the running count of strictly
positive partial sums.  Sign tests are integer comparisons in scaled lattice
units, so "S_k > 0" is never a floating-point question.  A separate
path-enumeration oracle recomputes the same laws exhaustively and also
evaluates the return-time/ladder-epoch identity for P_i(M_n = i, S_n > 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ResourceCapError, UnsupportedModelError
from .lattice import LatticeStructure, lattice_structure
from .model import MrwModel, require_valid

DEFAULT_CELL_CAP = 10_000_000
DEFAULT_OCCUPATION_CAP = 300
DEFAULT_ENUMERATION_CAP = 12
DEFAULT_ENUM_ROW_CAP = 5_000_000


def _require_lattice(m: MrwModel) -> LatticeStructure:
    require_valid(m)
    return lattice_structure(m)


# ---------------------------------------------------------------------------
# Joint law of (M_n, S_n)


@dataclass(frozen=True)
class LatticeLaw:
    """Sparse-in-spirit table P(M_n = j, S_n = a*h + n*r), indexed by state
    and lattice column (lattice index a = base + column)."""

    states: tuple
    n: int
    base: int
    table: np.ndarray  # (num_states, width)
    structure: LatticeStructure

    @property
    def span(self) -> float:
        return float(self.structure.span)

    @property
    def offset(self) -> float:
        return float(self.structure.offset_at(self.n))

    def total_mass(self) -> float:
        return float(self.table.sum())

    def value_of_column(self, col: int) -> float:
        return self.structure.value(self.base + col, self.n)

    def _positive_col(self, x=0) -> int:
        return self.structure.first_index_above(self.n, x) - self.base

    def prob_positive(self, x=0) -> float:
        col = max(self._positive_col(x), 0)
        if col >= self.table.shape[1]:
            return 0.0
        return float(self.table[:, col:].sum())

    def prob_positive_at_state(self, j) -> float:
        col = max(self._positive_col(), 0)
        if col >= self.table.shape[1]:
            return 0.0
        return float(self.table[j, col:].sum())

    def prob_level(self, x=0) -> float:
        """P(S_n == x) exactly (0 when x is off-lattice)."""
        a = self.structure.index_at_level(self.n, x)
        if a is None:
            return 0.0
        col = a - self.base
        if not 0 <= col < self.table.shape[1]:
            return 0.0
        return float(self.table[:, col].sum())

    def rows(self):
        """Yield (n, state label, lattice index, value, probability) for
        every nonzero cell, in fixed (state, index) order."""
        for s in range(len(self.states)):
            for col in np.nonzero(self.table[s])[0]:
                a = self.base + int(col)
                yield (
                    self.n,
                    self.states[s],
                    a,
                    self.value_of_column(int(col)),
                    float(self.table[s, col]),
                )


def exact_law(m: MrwModel, i0, n: int, cell_cap: int = DEFAULT_CELL_CAP) -> LatticeLaw:
    """Forward DP for the joint law of (M_n, S_n)."""
    ls = _require_lattice(m)
    if n < 0:
        raise ValueError("n must be nonnegative")
    start = m.state_index(i0)
    num_states = m.num_states
    min_a, max_a = ls.min_step, ls.max_step
    growth = max_a - min_a

    dp = np.zeros((num_states, 1))
    dp[start, 0] = 1.0
    base = 0
    edges = sorted(ls.edge_steps.items())
    for _ in range(n):
        width = dp.shape[1]
        new_width = width + growth
        if num_states * new_width > cell_cap:
            raise ResourceCapError(
                f"lattice law would exceed the {cell_cap}-cell cap"
            )
        new = np.zeros((num_states, new_width))
        for (i, j), steps in edges:
            row = dp[i]
            for a, w in steps:
                off = a - min_a
                new[j, off : off + width] += w * row
        dp = new
        base += min_a
    return LatticeLaw(states=m.states, n=n, base=base, table=dp, structure=ls)


def prob_positive(m: MrwModel, i0, n: int) -> float:
    """P_{i0}(S_n > 0), strict."""
    return exact_law(m, i0, n).prob_positive()


def prob_positive_at_state(m: MrwModel, i0, j, n: int) -> float:
    """P_{i0}(M_n = j, S_n > 0)."""
    law = exact_law(m, i0, n)
    return law.prob_positive_at_state(m.state_index(j))


def prob_positive_curve(m: MrwModel, i0, n: int, cell_cap: int = DEFAULT_CELL_CAP):
    """Array of P_{i0}(S_k > 0) for k = 1..n from a single DP sweep."""
    ls = _require_lattice(m)
    start = m.state_index(i0)
    num_states = m.num_states
    min_a, max_a = ls.min_step, ls.max_step
    dp = np.zeros((num_states, 1))
    dp[start, 0] = 1.0
    base = 0
    edges = sorted(ls.edge_steps.items())
    out = np.empty(n)
    for t in range(1, n + 1):
        width = dp.shape[1]
        new_width = width + (max_a - min_a)
        if num_states * new_width > cell_cap:
            raise ResourceCapError(f"lattice law would exceed the {cell_cap}-cell cap")
        new = np.zeros((num_states, new_width))
        for (i, j), steps in edges:
            row = dp[i]
            for a, w in steps:
                off = a - min_a
                new[j, off : off + width] += w * row
        dp = new
        base += min_a
        col = max(ls.first_index_above(t) - base, 0)
        out[t - 1] = dp[:, col:].sum() if col < dp.shape[1] else 0.0
    return out


def prob_level_curve(m: MrwModel, i0, n: int, x=0, cell_cap: int = DEFAULT_CELL_CAP):
    """Array of P_{i0}(S_k == x) for k = 1..n."""
    ls = _require_lattice(m)
    start = m.state_index(i0)
    num_states = m.num_states
    min_a, max_a = ls.min_step, ls.max_step
    dp = np.zeros((num_states, 1))
    dp[start, 0] = 1.0
    base = 0
    edges = sorted(ls.edge_steps.items())
    out = np.zeros(n)
    for t in range(1, n + 1):
        width = dp.shape[1]
        new = np.zeros((num_states, width + (max_a - min_a)))
        if new.size > cell_cap:
            raise ResourceCapError(f"lattice law would exceed the {cell_cap}-cell cap")
        for (i, j), steps in edges:
            row = dp[i]
            for a, w in steps:
                off = a - min_a
                new[j, off : off + width] += w * row
        dp = new
        base += min_a
        a = ls.index_at_level(t, x)
        if a is not None and 0 <= a - base < dp.shape[1]:
            out[t - 1] = dp[:, a - base].sum()
    return out


# ---------------------------------------------------------------------------
# Occupation-count laws


@dataclass(frozen=True)
class OccupationLaw:
    """Joint law P(M_n = j, S_n = a*h + n*r, #{k <= n : S_k > x} = m)."""

    states: tuple
    n: int
    threshold: float
    base: int
    table: np.ndarray  # (num_states, width, n + 1)
    structure: LatticeStructure

    def total_mass(self) -> float:
        return float(self.table.sum())

    def count_marginal(self) -> np.ndarray:
        """P(N_n^>(x) = m) for m = 0..n."""
        return self.table.sum(axis=(0, 1))

    def lattice_marginal(self):
        """(base, 2-D table) marginalized over the count dimension."""
        return self.base, self.table.sum(axis=2)

    def fraction_atoms(self):
        """(values m/n, probabilities) of the occupation fraction."""
        probs = self.count_marginal()
        values = np.arange(self.n + 1) / max(self.n, 1)
        return values, probs


def _occupation_dp(m: MrwModel, i0, n: int, threshold, cap: int) -> OccupationLaw:
    ls = _require_lattice(m)
    if n > cap:
        raise ResourceCapError(f"occupation horizon {n} exceeds the cap {cap}")
    start = m.state_index(i0)
    num_states = m.num_states
    min_a, max_a = ls.min_step, ls.max_step
    base = min(0, n * min_a)
    top = max(0, n * max_a)
    width = top - base + 1
    thr = Fraction(threshold)

    dp = np.zeros((num_states, width, n + 1))
    dp[start, -base, 0] = 1.0
    edges = sorted(ls.edge_steps.items())
    for t in range(1, n + 1):
        cpos = ls.first_index_above(t, thr) - base
        new = np.zeros_like(dp)
        for (i, j), steps in edges:
            for a, w in steps:
                s_lo = max(0, -a)
                s_hi = min(width, width - a)
                if s_lo >= s_hi:
                    continue
                d_lo, d_hi = s_lo + a, s_hi + a
                mid = min(max(cpos, d_lo), d_hi)
                if mid > d_lo:
                    new[j, d_lo:mid, :] += w * dp[i, s_lo : s_lo + (mid - d_lo), :]
                if d_hi > mid:
                    new[j, mid:d_hi, 1:] += w * dp[i, s_lo + (mid - d_lo) : s_hi, :-1]
        dp = new
    return OccupationLaw(
        states=m.states,
        n=n,
        threshold=float(threshold),
        base=base,
        table=dp,
        structure=ls,
    )


def occupation_law(m: MrwModel, i0, n: int, cap: int = DEFAULT_OCCUPATION_CAP) -> OccupationLaw:
    """Exact joint law of (M_n, S_n, N_n^>) with the strict-positivity count."""
    return _occupation_dp(m, i0, n, 0, cap)


def threshold_counts_law(
    m: MrwModel, i0, n: int, x, cap: int = DEFAULT_OCCUPATION_CAP
) -> OccupationLaw:
    """Exact law of the count of S_k > x, k = 1..n (joint with (M_n, S_n))."""
    return _occupation_dp(m, i0, n, x, cap)


# ---------------------------------------------------------------------------
# Embedded-walk return law


@dataclass(frozen=True)
class ReturnLaw:
    """Law of (tau(i), S_tau(i)) truncated at tau(i) <= horizon, plus the
    tail mass P_i(tau(i) > horizon).  mass[t] is indexed by lattice column
    (lattice index = base + column, value = index*h + t*r)."""

    state: str
    horizon: int
    base: int
    mass: np.ndarray  # (horizon + 1, width); row 0 unused
    tail: float
    structure: LatticeStructure

    def prob_tau(self, t: int) -> float:
        return float(self.mass[t].sum())

    def total_mass(self) -> float:
        return float(self.mass.sum() + self.tail)

    def prob_return_positive(self, t: int) -> float:
        col = max(self.structure.first_index_above(t) - self.base, 0)
        if col >= self.mass.shape[1]:
            return 0.0
        return float(self.mass[t, col:].sum())

    def scaled_increment_pmf(self):
        """Map scaled value (units h/q) of S_tau(i) -> probability."""
        q, p = self.structure.q, self.structure.p
        out = {}
        for t in range(1, self.horizon + 1):
            for col in np.nonzero(self.mass[t])[0]:
                v = (self.base + int(col)) * q + t * p
                out[v] = out.get(v, 0.0) + float(self.mass[t, col])
        return out


def embedded_return_law(m: MrwModel, i, horizon: int, cell_cap: int = DEFAULT_CELL_CAP) -> ReturnLaw:
    """Exact law of the first return to state i, killed at the horizon."""
    ls = _require_lattice(m)
    target = m.state_index(i)
    num_states = m.num_states
    min_a, max_a = ls.min_step, ls.max_step
    base = min(0, horizon * min_a)
    width = max(0, horizon * max_a) - base + 1
    if num_states * width > cell_cap:
        raise ResourceCapError(f"return-law table would exceed the {cell_cap}-cell cap")

    dp = np.zeros((num_states, width))
    dp[target, -base] = 1.0
    mass = np.zeros((horizon + 1, width))
    edges = sorted(ls.edge_steps.items())
    for t in range(1, horizon + 1):
        new = np.zeros_like(dp)
        for (i_, j), steps in edges:
            row = dp[i_]
            for a, w in steps:
                s_lo = max(0, -a)
                s_hi = min(width, width - a)
                if s_lo < s_hi:
                    new[j, s_lo + a : s_hi + a] += w * row[s_lo:s_hi]
        mass[t] = new[target]
        new[target] = 0.0
        dp = new
    return ReturnLaw(
        state=m.states[target],
        horizon=horizon,
        base=base,
        mass=mass,
        tail=float(dp.sum()),
        structure=ls,
    )


def embedded_positive_curve(m: MrwModel, i, n: int, horizon: int = 120) -> np.ndarray:
    """P_i(S_{tau_k(i)} > 0) for k = 1..n via k-fold convolution of the
    (truncated) return-increment law.  The truncation tail bounds the error."""
    rl = embedded_return_law(m, i, horizon)
    pmf = rl.scaled_increment_pmf()
    if not pmf:
        return np.zeros(n)
    keys = sorted(pmf)
    lo, hi = keys[0], keys[-1]
    step = np.zeros(hi - lo + 1)
    for v, p in pmf.items():
        step[v - lo] = p
    cur = step.copy()
    origin = lo  # scaled value of index 0
    out = np.empty(n)
    for k in range(1, n + 1):
        if k > 1:
            cur = np.convolve(cur, step)
            origin += lo
        first_pos = max(1 - origin, 0)  # scaled value > 0
        out[k - 1] = cur[first_pos:].sum() if first_pos < len(cur) else 0.0
    return out


# ---------------------------------------------------------------------------
# Ladder epochs


@dataclass(frozen=True)
class LadderStructure:
    """Strictly ascending ladder epochs of an embedded walk.

    epochs are 1-based indices into the walk; the walk is finite, so the
    sequence is always exhausted ("defective within horizon") at the end.
    """

    epochs: tuple
    heights: tuple
    horizon: int

    @property
    def count(self) -> int:
        return len(self.epochs)


def ladder_epochs(walk) -> LadderStructure:
    """Strict record times of a walk given as (S_{tau_1}, S_{tau_2}, ...)."""
    values = list(walk)
    epochs = []
    heights = []
    record = 0.0
    for idx, value in enumerate(values, start=1):
        if value > record:
            epochs.append(idx)
            heights.append(float(value))
            record = value
    return LadderStructure(tuple(epochs), tuple(heights), horizon=len(values))


# ---------------------------------------------------------------------------
# Path enumeration: oracle laws and the return/ladder identity


@dataclass(frozen=True)
class SpitzerIdentityReport:
    n: int
    lhs: float
    rhs: float
    paths: int

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


def spitzer_identity(
    m: MrwModel,
    i,
    n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    row_cap: int = DEFAULT_ENUM_ROW_CAP,
) -> SpitzerIdentityReport:
    """Both sides of
    P_i(M_n = i, S_n > 0) = sum_k (n/k) E_i[(sigma(k)/tau_{sigma(k)}) 1{tau_{sigma(k)} = n}].

    The left side comes from the DP law; the right side from exhaustive path
    enumeration with per-path return and ladder accounting, so the two
    routes share no machinery.
    """
    if n > cap:
        raise ResourceCapError(f"enumeration horizon {n} exceeds the cap {cap}")
    ls = _require_lattice(m)
    target = m.state_index(i)
    lhs = exact_law(m, target, n).prob_positive_at_state(target)

    branches = ls.branches(m.num_states)
    q, p = ls.q, ls.p
    state = np.array([target], dtype=np.int64)
    sval = np.zeros(1, dtype=np.int64)
    weight = np.ones(1)
    record = np.zeros(1, dtype=np.int64)
    ladders = np.zeros(1, dtype=np.int64)
    returns = np.zeros(1, dtype=np.int64)
    rhs = 0.0
    for t in range(1, n + 1):
        parts = []
        for s in range(m.num_states):
            mask = state == s
            if not mask.any():
                continue
            sv = sval[mask]
            wv = weight[mask]
            rv = record[mask]
            kv = ladders[mask]
            mv = returns[mask]
            for (j, a, w) in branches[s]:
                parts.append((
                    np.full(mask.sum(), j, dtype=np.int64),
                    sv + (a * q + p),
                    wv * w,
                    rv,
                    kv,
                    mv,
                ))
        state = np.concatenate([x[0] for x in parts])
        sval = np.concatenate([x[1] for x in parts])
        weight = np.concatenate([x[2] for x in parts])
        record = np.concatenate([x[3] for x in parts])
        ladders = np.concatenate([x[4] for x in parts])
        returns = np.concatenate([x[5] for x in parts])
        if len(state) > row_cap:
            raise ResourceCapError(f"enumeration exceeded {row_cap} paths")
        at_target = state == target
        is_record = at_target & (sval > record)
        if t < n:
            returns = returns + at_target
            ladders = ladders + is_record
            record = np.where(is_record, sval, record)
        else:
            final_m = returns[is_record] + 1
            final_k = ladders[is_record] + 1
            rhs = float(np.sum(weight[is_record] * (final_m / final_k)))
    return SpitzerIdentityReport(n=n, lhs=float(lhs), rhs=rhs, paths=len(state))


def classic_spitzer_rhs(m: MrwModel, n: int, row_cap: int = DEFAULT_ENUM_ROW_CAP) -> float:
    """sum_k (n/k) P(sigma(k) = n) for a single-state model's ordinary walk,
    computed by direct record-time enumeration (the classic formula route)."""
    if m.num_states != 1:
        raise UnsupportedModelError("classic formula applies to single-state models")
    ls = _require_lattice(m)
    q, p = ls.q, ls.p
    steps = ls.edge_steps[(0, 0)]
    sval = np.zeros(1, dtype=np.int64)
    weight = np.ones(1)
    record = np.zeros(1, dtype=np.int64)
    ladders = np.zeros(1, dtype=np.int64)
    for t in range(1, n + 1):
        sval = np.concatenate([sval + (a * q + p) for a, _ in steps])
        weight = np.concatenate([weight * w for _, w in steps])
        record = np.tile(record, len(steps))
        ladders = np.tile(ladders, len(steps))
        if len(sval) > row_cap:
            raise ResourceCapError(f"enumeration exceeded {row_cap} paths")
        is_record = sval > record
        if t < n:
            ladders = ladders + is_record
            record = np.where(is_record, sval, record)
        else:
            final_k = ladders[is_record] + 1
            return float(np.sum(weight[is_record] * (n / final_k)))
    return 0.0


def brute_force_law(
    m: MrwModel,
    i0,
    n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    row_cap: int = DEFAULT_ENUM_ROW_CAP,
) -> LatticeLaw:
    """Exhaustive-enumeration oracle for exact_law (n small)."""
    if n > cap:
        raise ResourceCapError(f"enumeration horizon {n} exceeds the cap {cap}")
    ls = _require_lattice(m)
    start = m.state_index(i0)
    branches = ls.branches(m.num_states)
    q, p = ls.q, ls.p
    state = np.array([start], dtype=np.int64)
    sval = np.zeros(1, dtype=np.int64)
    weight = np.ones(1)
    for _ in range(n):
        parts = []
        for s in range(m.num_states):
            mask = state == s
            if not mask.any():
                continue
            for (j, a, w) in branches[s]:
                parts.append((
                    np.full(mask.sum(), j, dtype=np.int64),
                    sval[mask] + (a * q + p),
                    weight[mask] * w,
                ))
        state = np.concatenate([x[0] for x in parts])
        sval = np.concatenate([x[1] for x in parts])
        weight = np.concatenate([x[2] for x in parts])
        if len(state) > row_cap:
            raise ResourceCapError(f"enumeration exceeded {row_cap} paths")
    min_a, max_a = ls.min_step, ls.max_step
    base = n * min_a if n > 0 else 0
    width = n * (max_a - min_a) + 1
    table = np.zeros((m.num_states, width))
    cols = (sval - n * p) // q - base
    np.add.at(table, (state, cols), weight)
    return LatticeLaw(states=m.states, n=n, base=base, table=table, structure=ls)


def brute_force_occupation(
    m: MrwModel,
    i0,
    n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    row_cap: int = DEFAULT_ENUM_ROW_CAP,
) -> OccupationLaw:
    """Exhaustive-enumeration oracle for occupation_law (n small)."""
    if n > cap:
        raise ResourceCapError(f"enumeration horizon {n} exceeds the cap {cap}")
    ls = _require_lattice(m)
    start = m.state_index(i0)
    branches = ls.branches(m.num_states)
    q, p = ls.q, ls.p
    state = np.array([start], dtype=np.int64)
    sval = np.zeros(1, dtype=np.int64)
    weight = np.ones(1)
    count = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        parts = []
        for s in range(m.num_states):
            mask = state == s
            if not mask.any():
                continue
            for (j, a, w) in branches[s]:
                parts.append((
                    np.full(mask.sum(), j, dtype=np.int64),
                    sval[mask] + (a * q + p),
                    weight[mask] * w,
                    count[mask],
                ))
        state = np.concatenate([x[0] for x in parts])
        sval = np.concatenate([x[1] for x in parts])
        weight = np.concatenate([x[2] for x in parts])
        count = np.concatenate([x[3] for x in parts])
        if len(state) > row_cap:
            raise ResourceCapError(f"enumeration exceeded {row_cap} paths")
        count = count + (sval > 0)
    min_a, max_a = ls.min_step, ls.max_step
    base = min(0, n * min_a)
    width = max(0, n * max_a) - base + 1
    table = np.zeros((m.num_states, width, n + 1))
    cols = (sval - n * p) // q - base
    np.add.at(table, (state, cols, count), weight)
    return OccupationLaw(
        states=m.states, n=n, threshold=0.0, base=base, table=table, structure=ls
    )
