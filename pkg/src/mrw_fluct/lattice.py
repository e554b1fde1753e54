"""Lattice compatibility analysis.

Exact distribution computations need every increment to live on one global
arithmetic lattice: values a*h + r with integer a, a common span h, and a
single per-step residual r shared by all edges (so that the offset after n
steps is exactly n*r).  Spans, residuals and indices are carried as exact
Fractions; sign tests on partial sums reduce to integer comparisons in units
of h / q where r/h = p/q in lowest terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import UnsupportedModelError
from .model import GaussianKernel, LatticeKernel, MrwModel, PointKernel


def _fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    a, b = abs(a), abs(b)
    if a == 0:
        return b
    if b == 0:
        return a
    num = math.gcd(a.numerator * b.denominator, b.numerator * a.denominator)
    return Fraction(num, a.denominator * b.denominator)


@dataclass(frozen=True)
class LatticeStructure:
    """Exact lattice form of a model's step increments.

    edge_steps[(i, j)] lists (a, w) with w = p_ij * pmf-weight and increment
    value a*span + residual.  In scaled integer units (1 unit = span/q) a
    step contributes a*q + p and the offset after n steps is n*p.
    """

    span: Fraction
    residual: Fraction
    edge_steps: dict
    min_step: int
    max_step: int

    @property
    def q(self) -> int:
        return (self.residual / self.span).denominator

    @property
    def p(self) -> int:
        return (self.residual / self.span).numerator

    def offset_at(self, n: int) -> Fraction:
        return n * self.residual

    def value(self, a: int, n: int) -> float:
        """Float value of lattice index a after n steps."""
        return float(a * self.span + n * self.residual)

    def first_index_above(self, n: int, x=0) -> int:
        """Smallest lattice index a with a*span + n*residual > x."""
        bound = (Fraction(x) - n * self.residual) / self.span
        return math.floor(bound) + 1

    def index_at_level(self, n: int, x=0):
        """Lattice index a with a*span + n*residual == x, or None."""
        val = (Fraction(x) - n * self.residual) / self.span
        return int(val) if val.denominator == 1 else None

    def branches(self, num_states):
        """Per-state list of (target, a, w) transition-and-step branches."""
        out = [[] for _ in range(num_states)]
        for (i, j), steps in sorted(self.edge_steps.items()):
            for a, w in steps:
                out[i].append((j, a, w))
        return out


def lattice_structure(m: MrwModel) -> LatticeStructure:
    """Derive the global lattice form, or raise UnsupportedModelError."""
    edge_values = {}
    spans = []
    for i, j, p, kernel in m.live_edges():
        if isinstance(kernel, GaussianKernel):
            raise UnsupportedModelError(
                f"gaussian kernel on edge ({m.states[i]!r} -> {m.states[j]!r}) "
                "has no lattice form"
            )
        if isinstance(kernel, LatticeKernel):
            spans.append(Fraction(kernel.h))
            values = [
                (Fraction(a) * Fraction(kernel.h) + Fraction(kernel.c), p * w)
                for a, w in kernel.pmf
            ]
        elif isinstance(kernel, PointKernel):
            values = [(Fraction(kernel.v), p)]
        else:
            raise UnsupportedModelError(f"unknown kernel type on edge ({i}, {j})")
        edge_values[(i, j)] = values

    all_values = [v for vals in edge_values.values() for v, _ in vals]
    v0 = all_values[0]
    g = Fraction(0)
    for s in spans:
        g = _fraction_gcd(g, s)
    for v in all_values:
        g = _fraction_gcd(g, v - v0)
    if g == 0:
        span = abs(v0) if v0 != 0 else Fraction(1)
    else:
        span = g
    residual = v0 % span

    edge_steps = {}
    min_step = None
    max_step = None
    for edge, values in edge_values.items():
        steps = []
        for v, w in values:
            a = (v - residual) / span
            if a.denominator != 1:
                raise UnsupportedModelError(
                    f"increment {float(v)} not representable on span {float(span)} "
                    f"with residual {float(residual)}"
                )
            a = int(a)
            steps.append((a, float(w)))
            min_step = a if min_step is None else min(min_step, a)
            max_step = a if max_step is None else max(max_step, a)
        edge_steps[edge] = tuple(sorted(steps))
    return LatticeStructure(
        span=span,
        residual=residual,
        edge_steps=edge_steps,
        min_step=min_step,
        max_step=max_step,
    )


def is_lattice_exact(m: MrwModel) -> bool:
    try:
        lattice_structure(m)
    except UnsupportedModelError:
        return False
    return True
