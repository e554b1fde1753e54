"""Empirical distributions, Kolmogorov-Smirnov distances, and the
cross-route consistency report for the positivity parameter rho."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .arcsine import ArcsineLaw
from .exact import OccupationLaw, prob_positive_curve
from .lattice import is_lattice_exact
from .model import MrwModel, require_valid, stationary_distribution
from .montecarlo import (
    EstimatorResult,
    embedded_spitzer_average,
    occupation_fraction_samples,
    spitzer_average,
    strong_spitzer_curve,
)


@dataclass(frozen=True)
class NormalLaw:
    mean: float
    var: float

    def cdf(self, x):
        return ndtr((np.asarray(x, dtype=float) - self.mean) / math.sqrt(self.var))

    def cdf_left(self, x):
        return self.cdf(x)


class EmpiricalDistribution:
    """Weighted atoms (value, probability); equal weights for raw samples."""

    def __init__(self, values, weights=None):
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError("empirical distribution needs at least one atom")
        if weights is None:
            weights = np.full(values.size, 1.0 / values.size)
        else:
            weights = np.asarray(weights, dtype=float)
        order = np.argsort(values, kind="stable")
        self.values = values[order]
        self.weights = weights[order]
        total = self.weights.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total!r}, not 1")

    @classmethod
    def from_samples(cls, samples):
        return cls(samples)

    @classmethod
    def from_occupation_law(cls, law: OccupationLaw):
        values, probs = law.fraction_atoms()
        keep = probs > 0
        return cls(values[keep], probs[keep] / probs[keep].sum())

    def collapsed(self):
        """(unique values, summed weights)."""
        uniq, inverse = np.unique(self.values, return_inverse=True)
        w = np.zeros(uniq.size)
        np.add.at(w, inverse, self.weights)
        return uniq, w


def ks_distance(emp: EmpiricalDistribution, law) -> float:
    """sup_x |F_emp(x) - F_law(x)|, evaluated on both sides of every atom.

    `law` needs cdf(x) and cdf_left(x); ArcsineLaw and NormalLaw qualify.
    """
    values, weights = emp.collapsed()
    cum = np.cumsum(weights)
    cum_before = cum - weights
    f_right = np.asarray(law.cdf(values), dtype=float)
    f_left = np.asarray(law.cdf_left(values), dtype=float)
    gaps = np.maximum(np.abs(f_right - cum), np.abs(f_left - cum_before))
    return float(gaps.max())


# ---------------------------------------------------------------------------
# rho consistency report


@dataclass(frozen=True)
class RhoConfig:
    """Experiment budget for the four-route rho comparison."""

    n_occupation: int = 2000
    n_cycles: int = 400
    n_spitzer: int = 2000
    n_terminal: int = 1000
    paths: int = 4000
    seed: int = 0
    tolerance: float = 0.03


@dataclass(frozen=True)
class RhoReport:
    estimates: dict  # route name -> EstimatorResult
    max_gap: float
    stationary_gap: float
    tolerance: float
    passed: bool


def rho_report(m: MrwModel, i, config: RhoConfig = RhoConfig()) -> RhoReport:
    """Estimate rho along the four equivalent routes plus the
    stationary-start average, and check pairwise consistency.

    Routes: (a) mean occupation fraction, (b) embedded-walk positivity
    average over cycles, (c) step-wise positivity average, (d) terminal
    positivity probability; plus the pi-weighted variant of (c), which must
    agree with (c) within tolerance.
    """
    require_valid(m)
    seed = config.seed
    occ = occupation_fraction_samples(
        m, i, config.n_occupation, config.paths, seed
    )
    paths = config.paths
    est_a = EstimatorResult(
        float(occ.mean()),
        float(occ.std(ddof=1) / math.sqrt(paths)) if paths > 1 else 0.0,
        paths,
        seed,
    )
    est_b = embedded_spitzer_average(m, i, config.n_cycles, paths, seed + 1)
    est_c = spitzer_average(m, i, config.n_spitzer, paths, seed + 2)
    est_d = strong_spitzer_curve(m, i, [config.n_terminal], paths, seed + 3)[0]

    pi = stationary_distribution(m)
    if est_c.exact:
        weighted = 0.0
        for s_idx, s in enumerate(m.states):
            weighted += pi[s_idx] * prob_positive_curve(m, s, config.n_spitzer).mean()
        est_pi = EstimatorResult(float(weighted), 0.0, 0, seed, exact=True)
    else:
        weighted = 0.0
        var = 0.0
        for s_idx, s in enumerate(m.states):
            r = spitzer_average(m, s, config.n_spitzer, paths, seed + 4 + s_idx)
            weighted += pi[s_idx] * r.estimate
            var += (pi[s_idx] * r.stderr) ** 2
        est_pi = EstimatorResult(float(weighted), math.sqrt(var), paths, seed)

    estimates = {
        "occupation_mean": est_a,
        "embedded_average": est_b,
        "spitzer_average": est_c,
        "terminal_probability": est_d,
        "stationary_spitzer_average": est_pi,
    }
    core = [est_a.estimate, est_b.estimate, est_c.estimate, est_d.estimate]
    max_gap = max(abs(x - y) for x in core for y in core)
    stationary_gap = abs(est_pi.estimate - est_c.estimate)
    passed = max_gap <= config.tolerance and stationary_gap <= config.tolerance
    return RhoReport(
        estimates=estimates,
        max_gap=float(max_gap),
        stationary_gap=float(stationary_gap),
        tolerance=config.tolerance,
        passed=passed,
    )
