import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrw_fluct import (
    brute_force_law,
    brute_force_occupation,
    classic_spitzer_rhs,
    embedded_positive_curve,
    embedded_return_law,
    exact_law,
    ladder_epochs,
    occupation_law,
    prob_level_curve,
    prob_positive,
    prob_positive_curve,
    spitzer_identity,
    threshold_counts_law,
)
from mrw_fluct.catalog import (
    alternating_point,
    alternating_random,
    asymmetric_three_state,
    single_fair_walk,
    symmetric_two_state,
)
from mrw_fluct.errors import ResourceCapError

LATTICE_MODELS = [
    single_fair_walk,
    symmetric_two_state,
    alternating_point,
    alternating_random,
    asymmetric_three_state,
]


def law_dict(law):
    return {(s, a): p for (_, s, a, _, p) in law.rows()}


def test_exact_law_mass_one(two_state, three_state):
    for m in (two_state, three_state):
        for n in (0, 1, 5, 9):
            assert exact_law(m, 0, n).total_mass() == pytest.approx(1.0, abs=1e-13)


def test_fair_walk_two_steps(fair_walk):
    law = exact_law(fair_walk, 0, 2)
    d = law_dict(law)
    assert d[("a", 2)] == pytest.approx(0.25, abs=1e-15)
    assert d[("a", -2)] == pytest.approx(0.25, abs=1e-15)
    assert d[("a", 0)] == pytest.approx(0.5, abs=1e-15)
    assert law.prob_positive() == pytest.approx(0.25, abs=1e-15)
    assert law.prob_level(0) == pytest.approx(0.5, abs=1e-15)


def test_alternating_values_track_offset(alternating):
    # After an odd number of steps S is +1 with probability 1.
    law = exact_law(alternating, "a", 3)
    rows = list(law.rows())
    assert len(rows) == 1
    _, state, index, value, prob = rows[0]
    assert (state, value, prob) == ("b", 1.0, 1.0)
    assert law.prob_positive() == 1.0


def test_prob_positive_curve_matches_pointwise(two_state):
    curve = prob_positive_curve(two_state, "a", 8)
    for n in range(1, 9):
        assert curve[n - 1] == pytest.approx(prob_positive(two_state, "a", n), abs=1e-14)


def test_prob_level_curve_matches_law(three_state):
    curve = prob_level_curve(three_state, "a", 6, 0)
    for n in range(1, 7):
        assert curve[n - 1] == pytest.approx(exact_law(three_state, "a", n).prob_level(0), abs=1e-14)


@pytest.mark.parametrize("make", LATTICE_MODELS)
def test_brute_force_oracle(make):
    m = make()
    for i in m.states:
        for n in range(0, 6):
            exact = law_dict(exact_law(m, i, n))
            brute = law_dict(brute_force_law(m, i, n))
            keys = set(exact) | set(brute)
            worst = max(abs(exact.get(k, 0.0) - brute.get(k, 0.0)) for k in keys)
            assert worst <= 1e-13


@pytest.mark.parametrize("make", LATTICE_MODELS)
def test_occupation_oracle_and_marginals(make):
    m = make()
    n = 5
    occ = occupation_law(m, 0, n)
    brute = brute_force_occupation(m, 0, n)
    assert occ.total_mass() == pytest.approx(1.0, abs=1e-13)
    assert np.abs(occ.count_marginal() - brute.count_marginal()).max() <= 1e-13
    # Integrating out the count must reproduce the plain joint law.
    base, marg = occ.lattice_marginal()
    law = exact_law(m, 0, n)
    got = {
        (m.states[s], base + c): marg[s, c]
        for s in range(m.num_states)
        for c in np.nonzero(marg[s])[0]
    }
    want = law_dict(law)
    keys = set(got) | set(want)
    assert max(abs(got.get(k, 0.0) - want.get(k, 0.0)) for k in keys) <= 1e-13


def test_threshold_counts_law_shifts_boundary(fair_walk):
    # Counting S_k > 1 at n=1: only the +1 step fails; count is always 0.
    occ = threshold_counts_law(fair_walk, 0, 1, 1)
    np.testing.assert_allclose(occ.count_marginal(), [1.0, 0.0], atol=1e-15)


def test_occupation_cap():
    with pytest.raises(ResourceCapError):
        occupation_law(single_fair_walk(), 0, 301)


def test_embedded_return_fair_walk(fair_walk):
    rl = embedded_return_law(fair_walk, "a", 4)
    assert rl.prob_tau(1) == pytest.approx(1.0, abs=1e-14)
    assert rl.total_mass() == pytest.approx(1.0, abs=1e-14)


def test_embedded_return_two_state(two_state):
    # Return to "a": geometric with ratio 1/2.
    rl = embedded_return_law(two_state, "a", 10)
    for t in range(1, 11):
        assert rl.prob_tau(t) == pytest.approx(0.5**t, abs=1e-14)
    assert rl.tail == pytest.approx(0.5**10, abs=1e-14)


def test_embedded_return_alternating(alternating):
    rl = embedded_return_law(alternating, "a", 6)
    assert rl.prob_tau(2) == pytest.approx(1.0, abs=1e-15)
    assert rl.prob_return_positive(2) == 0.0  # S returns to exactly 0


def test_embedded_positive_curve_degenerate(alternating):
    curve = embedded_positive_curve(alternating, "a", 10)
    np.testing.assert_allclose(curve, 0.0, atol=0)


def test_embedded_positive_curve_symmetric(two_state):
    # The embedded walk is symmetric around 0 with an atom at 0, so the
    # strict-positivity probability stays below 1/2.
    curve = embedded_positive_curve(two_state, "a", 12)
    assert (curve < 0.5).all()
    # P(S_tau > 0) = (1 - P(S_tau = 0)) / 2 with P(S_tau = 0) = 2/sqrt(3) - 1.
    assert curve[0] == pytest.approx(1 - 1 / math.sqrt(3), abs=1e-10)


def test_ladder_epochs_examples():
    ls = ladder_epochs([1.0, 0.5, 2.0, 2.0, 3.0])
    assert ls.epochs == (1, 3, 5)
    assert ls.heights == (1.0, 2.0, 3.0)
    assert ladder_epochs([-1.0, -0.5, 0.0]).count == 0


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=30))
@settings(max_examples=50, deadline=None)
def test_ladder_epochs_are_strict_records(values):
    ls = ladder_epochs(values)
    partial = np.array(values)
    record = 0.0
    expected = []
    for k, v in enumerate(partial, start=1):
        if v > record:
            expected.append(k)
            record = v
    assert list(ls.epochs) == expected


@pytest.mark.parametrize("make", LATTICE_MODELS)
def test_spitzer_identity_small(make):
    m = make()
    for n in range(1, 7):
        report = spitzer_identity(m, m.states[0], n)
        assert report.difference <= 1e-11


def test_classic_reduction(fair_walk):
    for n in range(1, 9):
        lhs = prob_positive(fair_walk, "a", n)
        rhs = classic_spitzer_rhs(fair_walk, n)
        assert math.isclose(lhs, rhs, abs_tol=1e-13)


def test_spitzer_identity_cap(two_state):
    with pytest.raises(ResourceCapError):
        spitzer_identity(two_state, "a", 13)
