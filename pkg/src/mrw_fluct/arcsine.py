"""Generalized arcsine laws on [0, 1].

For theta in (0, 1) the law is Beta-shaped with density
sin(pi*theta)/pi * x^(theta-1) * (1-x)^(-theta); theta = 0 and 1 are the
point masses at 0 and 1.  The CDF is the regularized incomplete beta
I_x(theta, 1-theta); at theta = 1/2 this is (2/pi) * arcsin(sqrt(x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaincinv

from .errors import NoDensityError


@dataclass(frozen=True)
class ArcsineLaw:
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta {self.theta} outside [0, 1]")

    def density(self, x):
        return as_density(self.theta, x)

    def cdf(self, x):
        return as_cdf(self.theta, x)

    def cdf_left(self, x):
        """Left limit F(x-); differs from cdf only at the endpoint atoms."""
        x = np.asarray(x, dtype=float)
        if self.theta == 0.0:
            out = np.where(x > 0.0, 1.0, 0.0)
        elif self.theta == 1.0:
            out = np.where(x > 1.0, 1.0, 0.0)
        else:
            return as_cdf(self.theta, x)
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        return as_quantile(self.theta, p)

    def sample(self, count, seed):
        return as_sample(self.theta, count, seed)

    @property
    def mean(self):
        return self.theta


def as_density(theta: float, x):
    """Density of AS(theta); zero outside (0, 1)."""
    if theta in (0.0, 1.0):
        raise NoDensityError(f"AS({theta}) is a point mass and has no density")
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    out = np.zeros_like(x)
    xs = np.where(inside, x, 0.5)
    out = np.where(
        inside,
        math.sin(math.pi * theta) / math.pi * xs ** (theta - 1.0) * (1.0 - xs) ** (-theta),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def as_cdf(theta: float, x):
    """CDF of AS(theta), right-continuous, defined on all of R."""
    x = np.asarray(x, dtype=float)
    if theta == 0.0:
        out = np.where(x >= 0.0, 1.0, 0.0)
    elif theta == 1.0:
        out = np.where(x >= 1.0, 1.0, 0.0)
    else:
        out = betainc(theta, 1.0 - theta, np.clip(x, 0.0, 1.0))
    return float(out) if out.ndim == 0 else out


def as_quantile(theta: float, p):
    """Quantile function (inverse CDF) for p in (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("quantile argument outside [0, 1]")
    if theta == 0.0:
        out = np.zeros_like(p)
    elif theta == 1.0:
        out = np.ones_like(p)
    else:
        out = betaincinv(theta, 1.0 - theta, p)
    return float(out) if out.ndim == 0 else out


def as_sample(theta: float, count: int, seed: int) -> np.ndarray:
    """i.i.d. AS(theta) draws by quantile transform of Philox uniforms."""
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    u = gen.random(count)
    if theta == 0.0:
        return np.zeros(count)
    if theta == 1.0:
        return np.ones(count)
    return betaincinv(theta, 1.0 - theta, u)
