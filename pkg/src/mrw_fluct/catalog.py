"""Standard example models used by tests, experiments and documentation."""

from __future__ import annotations

from .model import GaussianKernel, LatticeKernel, MrwModel, PointKernel


def _coin(p_up=0.5, up=1, down=-1):
    return LatticeKernel(h=1.0, c=0.0, pmf={up: p_up, down: 1.0 - p_up})


def single_fair_walk() -> MrwModel:
    """One-state chain, fair +/-1 steps: the ordinary simple random walk."""
    return MrwModel(["a"], [[1.0]], [[_coin()]])


def single_drifted_walk(p_up: float = 0.9) -> MrwModel:
    """One-state chain with upward-biased +/-1 steps."""
    return MrwModel(["a"], [[1.0]], [[_coin(p_up)]])


def symmetric_two_state() -> MrwModel:
    """Uniform 2-state chain, fair +/-1 steps on every edge."""
    P = [[0.5, 0.5], [0.5, 0.5]]
    kernels = [[_coin(), _coin()], [_coin(), _coin()]]
    return MrwModel(["a", "b"], P, kernels)


def alternating_point() -> MrwModel:
    """Deterministic 2-cycle with point increments +1 / -1 (null-homologous)."""
    P = [[0.0, 1.0], [1.0, 0.0]]
    kernels = [
        [None, PointKernel(1.0)],
        [PointKernel(-1.0), None],
    ]
    return MrwModel(["a", "b"], P, kernels)


def alternating_random() -> MrwModel:
    """Period-2 chain with random +/-1 steps, asymmetric on the way back."""
    P = [[0.0, 1.0], [1.0, 0.0]]
    kernels = [
        [None, _coin(0.5)],
        [_coin(0.3), None],
    ]
    return MrwModel(["a", "b"], P, kernels)


def asymmetric_three_state() -> MrwModel:
    """Irreducible 3-state chain mixing point and two-atom lattice kernels."""
    P = [
        [0.5, 0.5, 0.0],
        [0.0, 0.4, 0.6],
        [0.7, 0.0, 0.3],
    ]
    kernels = [
        [_coin(), PointKernel(-1.0), None],
        [None, PointKernel(2.0), LatticeKernel(1.0, 0.0, {-1: 0.6, 2: 0.4})],
        [PointKernel(-2.0), None, _coin()],
    ]
    return MrwModel(["a", "b", "c"], P, kernels)


def gaussian_two_state(std: float = 1.0) -> MrwModel:
    """Uniform 2-state chain with centered Gaussian increments (not lattice)."""
    P = [[0.5, 0.5], [0.5, 0.5]]
    g = GaussianKernel(0.0, std)
    return MrwModel(["a", "b"], P, [[g, g], [g, g]])


def all_positive_two_state() -> MrwModel:
    """Every increment strictly positive; rho = 1 trivially."""
    P = [[0.5, 0.5], [0.5, 0.5]]
    kernels = [
        [PointKernel(1.0), PointKernel(2.0)],
        [PointKernel(1.0), PointKernel(1.0)],
    ]
    return MrwModel(["a", "b"], P, kernels)


def all_negative_two_state() -> MrwModel:
    """Every increment strictly negative; rho = 0 trivially."""
    P = [[0.5, 0.5], [0.5, 0.5]]
    kernels = [
        [PointKernel(-1.0), PointKernel(-2.0)],
        [PointKernel(-1.0), PointKernel(-1.0)],
    ]
    return MrwModel(["a", "b"], P, kernels)


STANDARD_MODELS = {
    "single-fair": single_fair_walk,
    "single-drifted": single_drifted_walk,
    "symmetric-two-state": symmetric_two_state,
    "alternating-point": alternating_point,
    "alternating-random": alternating_random,
    "asymmetric-three-state": asymmetric_three_state,
    "gaussian-two-state": gaussian_two_state,
    "all-positive": all_positive_two_state,
    "all-negative": all_negative_two_state,
}
