import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from mrw_fluct import ArcsineLaw, as_cdf, as_density, as_quantile, as_sample
from mrw_fluct.errors import NoDensityError


@pytest.mark.parametrize("theta", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_density_integrates_to_cdf(theta):
    # Quadrature of the density is an oracle independent of the beta routine.
    for x in (0.2, 0.5, 0.8):
        integral, err = quad(lambda t: as_density(theta, t), 0, x, points=[0])
        assert abs(integral - as_cdf(theta, x)) <= max(1e-9, 10 * err)


def test_half_case_closed_form():
    xs = np.linspace(1e-9, 1 - 1e-9, 1001)
    closed = 2 / math.pi * np.arcsin(np.sqrt(xs))
    got = as_cdf(0.5, xs)
    assert np.abs(got - closed).max() <= 1e-13


def test_endpoint_laws_are_point_masses():
    assert as_cdf(0.0, -0.1) == 0.0
    assert as_cdf(0.0, 0.0) == 1.0
    assert as_cdf(1.0, 0.999) == 0.0
    assert as_cdf(1.0, 1.0) == 1.0
    with pytest.raises(NoDensityError):
        as_density(0.0, 0.5)
    with pytest.raises(NoDensityError):
        as_density(1.0, 0.5)


def test_quantile_inverts_cdf():
    for theta in (0.25, 0.5, 0.75):
        for u in (0.01, 0.3, 0.5, 0.9, 0.99):
            x = as_quantile(theta, u)
            assert as_cdf(theta, x) == pytest.approx(u, abs=1e-10)


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.75])
def test_sampler_moments_and_reproducibility(theta):
    samples = as_sample(theta, 20_000, seed=11)
    assert ((samples >= 0) & (samples <= 1)).all()
    assert samples.mean() == pytest.approx(theta, abs=0.01)
    again = as_sample(theta, 20_000, seed=11)
    np.testing.assert_array_equal(samples, again)


def test_law_object_mean():
    law = ArcsineLaw(0.3)
    mean, _ = quad(lambda t: t * law.density(t), 0, 1)
    assert mean == pytest.approx(law.mean, abs=1e-9)
    assert law.mean == pytest.approx(0.3, abs=1e-12)


def test_cdf_left_continuity_interior():
    law = ArcsineLaw(0.5)
    # No atoms in the interior: left and right limits agree.
    assert law.cdf_left(0.4) == pytest.approx(law.cdf(0.4), abs=1e-14)
    # Endpoint laws carry atoms.
    atom = ArcsineLaw(0.0)
    assert atom.cdf(0.0) == 1.0
    assert atom.cdf_left(0.0) == 0.0


@given(
    st.floats(0.05, 0.95),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
)
@settings(max_examples=100, deadline=None)
def test_cdf_monotone(theta, x, y):
    lo, hi = min(x, y), max(x, y)
    assert as_cdf(theta, lo) <= as_cdf(theta, hi) + 1e-15
