import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrw_fluct import (
    GaussianKernel,
    LatticeKernel,
    MrwModel,
    PointKernel,
    dual,
    dump_model,
    is_null_homologous,
    load_model,
    period,
    stationary_distribution,
    validate_model,
)
from mrw_fluct.model import model_from_json, model_to_json


def test_validate_accepts_catalog_models(two_state, three_state, alternating, gaussian):
    for m in (two_state, three_state, alternating, gaussian):
        report = validate_model(m)
        assert report.ok, report.problems


def test_validate_rejects_bad_row_sum():
    m = MrwModel(["a"], [[0.9]], [[PointKernel(1.0)]])
    report = validate_model(m)
    assert not report.ok
    assert any("row" in p for p in report.problems)


def test_validate_rejects_negative_entry():
    m = MrwModel(["a", "b"], [[1.5, -0.5], [0.5, 0.5]], [[PointKernel(1.0)] * 2] * 2)
    assert not validate_model(m).ok


def test_validate_rejects_disconnected_chain():
    P = [[1.0, 0.0], [0.0, 1.0]]
    k = PointKernel(1.0)
    m = MrwModel(["a", "b"], P, [[k, None], [None, k]])
    report = validate_model(m)
    assert not report.ok


def test_validate_rejects_bad_kernel_pmf():
    bad_pmf = MrwModel(["a"], [[1.0]], [[LatticeKernel(1.0, 0.0, {1: 0.7, -1: 0.7})]])
    report = validate_model(bad_pmf)
    assert not report.ok
    assert any("pmf" in p for p in report.problems)
    bad_std = MrwModel(["a"], [[1.0]], [[GaussianKernel(0.0, -1.0)]])
    assert not validate_model(bad_std).ok


def test_state_index_accepts_labels_and_ints(three_state):
    assert three_state.state_index("b") == 1
    assert three_state.state_index(2) == 2
    with pytest.raises(KeyError):
        three_state.state_index("z")


def test_stationary_uniform_chain(two_state):
    pi = stationary_distribution(two_state)
    np.testing.assert_allclose(pi, [0.5, 0.5], atol=1e-12)


def test_stationary_is_left_eigenvector(three_state):
    pi = stationary_distribution(three_state)
    assert math.isclose(pi.sum(), 1.0, abs_tol=1e-12)
    np.testing.assert_allclose(pi @ three_state.transition, pi, atol=1e-10)
    assert (pi > 0).all()


def test_stationary_two_thirds_example():
    # Two-state chain with known closed-form stationary law (2/3, 1/3).
    P = [[0.5, 0.5], [1.0, 0.0]]
    k = PointKernel(1.0)
    m = MrwModel(["a", "b"], P, [[k, k], [k, None]])
    pi = stationary_distribution(m)
    np.testing.assert_allclose(pi, [2 / 3, 1 / 3], atol=1e-12)


def test_period_aperiodic(two_state, three_state):
    assert period(two_state).d == 1
    assert period(three_state).d == 1


def test_period_two_cycle(alternating):
    per = period(alternating)
    assert per.d == 2
    assert sorted(map(sorted, per.classes)) == [["a"], ["b"]]


def test_dual_is_involution(two_state, three_state, alternating_rand):
    for m in (two_state, three_state, alternating_rand):
        dd = dual(dual(m))
        np.testing.assert_allclose(dd.transition, m.transition, atol=1e-14)


def test_dual_preserves_stationary(three_state):
    d = dual(three_state)
    np.testing.assert_allclose(
        stationary_distribution(d), stationary_distribution(three_state), atol=1e-10
    )


def test_dual_transposes_kernels(alternating):
    d = dual(alternating)
    # The forward edge a->b carried +1; the dual's b->a edge must carry it.
    assert d.kernels[1][0] == alternating.kernels[0][1]


def test_null_homology_detects_potential(alternating):
    nh = is_null_homologous(alternating)
    assert nh.is_null
    g = nh.potential
    assert math.isclose(g["b"] - g["a"], 1.0, abs_tol=1e-12)


def test_null_homology_rejects_random_steps(two_state, alternating_rand):
    assert not is_null_homologous(two_state).is_null
    assert not is_null_homologous(alternating_rand).is_null


def test_json_round_trip(tmp_path, three_state):
    path = tmp_path / "m.json"
    dump_model(three_state, path)
    back = load_model(path)
    assert back.states == three_state.states
    np.testing.assert_allclose(back.transition, three_state.transition, atol=0)
    assert back.kernels == three_state.kernels


def test_json_rejects_nan():
    doc = model_to_json(MrwModel(["a"], [[1.0]], [[PointKernel(1.0)]]))
    doc["P"][0][0] = float("nan")
    with pytest.raises(ValueError):
        model_from_json(doc)


def test_json_schema_shape(gaussian):
    doc = model_to_json(gaussian)
    assert set(doc) == {"states", "P", "kernels"}
    assert doc["kernels"][0][0]["type"] == "gaussian"
    json.dumps(doc)  # must be serializable as-is


@st.composite
def random_two_state(draw):
    p = draw(st.floats(0.05, 0.95))
    q = draw(st.floats(0.05, 0.95))
    up = draw(st.floats(0.1, 0.9))
    P = [[p, 1 - p], [1 - q, q]]
    k = LatticeKernel(1.0, 0.0, {1: up, -1: 1 - up})
    return MrwModel(["a", "b"], P, [[k, k], [k, k]])


@given(random_two_state())
@settings(max_examples=25, deadline=None)
def test_stationary_property(m):
    pi = stationary_distribution(m)
    assert math.isclose(pi.sum(), 1.0, abs_tol=1e-10)
    np.testing.assert_allclose(pi @ m.transition, pi, atol=1e-9)


@given(random_two_state())
@settings(max_examples=25, deadline=None)
def test_json_round_trip_property(m):
    back = model_from_json(model_to_json(m))
    np.testing.assert_allclose(back.transition, m.transition, atol=0)
    assert back.kernels == m.kernels
