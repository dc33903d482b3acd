import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from relmech.errors import DegenerateMetric, LightlikeVelocity
from relmech.geometry import (
    MetricField,
    TangentPoint,
    christoffel,
    kinetic_energy,
    length_element_rate,
    liouville_components,
    lower_index,
    metric_inverse,
    theta_dot,
)
from relmech.forces import raise_index

from conftest import ETA, LAM, MU, random_polynomial_metric

MINK = MetricField.minkowski()
finite = st.floats(-10, 10, allow_nan=False)


def test_metric_inverse_examples():
    np.testing.assert_array_equal(metric_inverse(MINK, np.zeros(4)), np.diag([1.0, -1, -1, -1]))
    np.testing.assert_array_equal(metric_inverse(MetricField.euclidean(2), [3.0, 4.0]), np.eye(2))
    np.testing.assert_allclose(metric_inverse(MetricField.constant([[2, 0], [0, 1]]), [0, 0]), [[0.5, 0], [0, 1]])


def test_metric_inverse_degenerate():
    with pytest.raises(DegenerateMetric):
        metric_inverse(MetricField.constant([[1, 1], [1, 1]]), [0, 0])
    with pytest.raises(DegenerateMetric):
        metric_inverse(MetricField(2, lambda x: np.diag([1.0, x[0]])), [0.0, 0.0])


def test_only_upper_triangle_is_read():
    m = MetricField(2, lambda x: np.array([[1.0, 2.0], [99.0, 3.0]]))
    np.testing.assert_array_equal(m.at([0, 0]), [[1, 2], [2, 3]])


def test_inverse_relative_accuracy(rng):
    for _ in range(20):
        sym = random_polynomial_metric(rng, dim=3, degree=2)
        m = sym.field()
        x = rng.uniform(-1, 1, 3)
        g = m.at(x)
        prod = g @ metric_inverse(m, x)
        assert np.max(np.abs(prod - np.eye(3))) <= 1e-12 * max(1.0, np.linalg.cond(g))


def test_christoffel_constant_metrics_vanish():
    assert not np.any(christoffel(MINK, [1.0, 2.0, 3.0, 4.0]))
    m = MetricField(2, lambda x: np.array([[2.0, 0.5], [0.5, -1.0]]))
    np.testing.assert_allclose(christoffel(m, [0.3, 0.7]), 0.0, atol=1e-12)


def test_christoffel_polar(polar):
    # hand oracle: Gamma^r_thth = -r, Gamma^th_rth = Gamma^th_thr = 1/r
    gamma = christoffel(polar.field(), [2.0, 0.0])
    expected = np.zeros((2, 2, 2))
    expected[0, 1, 1] = -2.0
    expected[1, 0, 1] = expected[1, 1, 0] = 0.5
    np.testing.assert_allclose(gamma, expected, atol=1e-9)
    np.testing.assert_allclose(polar.christoffel([2.0, 0.0]), expected, atol=1e-15)
    np.testing.assert_allclose(christoffel(polar.field(analytic=True), [2.0, 0.0]), expected, atol=1e-15)


def test_christoffel_symmetry_and_fd_vs_analytic(rng):
    for _ in range(10):
        sym = random_polynomial_metric(rng, dim=3, degree=3)
        x = rng.uniform(-1, 1, 3)
        fd = christoffel(sym.field(), x)
        exact = christoffel(sym.field(analytic=True), x)
        assert np.max(np.abs(fd - fd.transpose(0, 2, 1))) <= 1e-10
        np.testing.assert_array_equal(exact, exact.transpose(0, 2, 1))
        np.testing.assert_allclose(fd, exact, atol=1e-6)
        np.testing.assert_allclose(exact, sym.christoffel(x), atol=1e-12)


def test_fd_step_env_override(monkeypatch, polar):
    monkeypatch.setenv("RELMECH_FD_STEP", "1e-2")
    coarse = christoffel(polar.field(), [2.0, 0.0])
    monkeypatch.delenv("RELMECH_FD_STEP")
    fine = christoffel(polar.field(), [2.0, 0.0])
    # the polar metric is quadratic in r, so central differences are exact up to rounding
    np.testing.assert_allclose(coarse, fine, atol=1e-9)


@pytest.mark.parametrize(
    "xdot, expected",
    [((1, 0, 0, 0), 0.5), ((1, 1, 0, 0), 0.0), ((LAM, 0, ETA, 0), 0.5)],
)
def test_kinetic_energy_minkowski(xdot, expected):
    assert kinetic_energy(MINK, TangentPoint(np.zeros(4), xdot)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "m, xdot, expected",
    [
        (MetricField.euclidean(2), (3, 4), (3, 4)),
        (MINK, (1, 1, 0, 0), (1, -1, 0, 0)),
        (MetricField.constant([[2, 0], [0, 1]]), (1, 1), (2, 1)),
    ],
)
def test_liouville_components(m, xdot, expected):
    np.testing.assert_array_equal(liouville_components(m, TangentPoint(np.zeros(m.dim), xdot)), expected)


def test_theta_dot_examples():
    assert theta_dot(MINK, TangentPoint(np.zeros(4), [1, 0, 0, 0])) == 1.0
    assert theta_dot(MINK, TangentPoint(np.zeros(4), [1, 1, 0, 0])) == 0.0
    for t in np.linspace(0, math.pi, 13):
        v = TangentPoint(np.zeros(4), [LAM, -ETA * math.sin(t), ETA * math.cos(t), 0])
        assert theta_dot(MINK, v) == pytest.approx(LAM ** 2 - ETA ** 2, abs=1e-14)
        assert theta_dot(MINK, v) == pytest.approx(1.0, abs=1e-14)


def test_length_element_rate():
    assert length_element_rate(MINK, TangentPoint(np.zeros(4), [1, 0, 0, 0])) == 1.0
    lam = LAM
    v = TangentPoint(np.zeros(4), [MU, -2 * MU * ETA / (math.pi * lam), 0, 0])
    assert length_element_rate(MINK, v) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(LightlikeVelocity):
        length_element_rate(MINK, TangentPoint(np.zeros(4), [1, 1, 0, 0]))
    assert length_element_rate(MINK, TangentPoint(np.zeros(4), [0, 2, 0, 0])) == 2.0


@given(st.lists(finite, min_size=4, max_size=4), st.lists(finite, min_size=4, max_size=4))
def test_theta_dot_is_twice_kinetic_energy(x, xdot):
    v = TangentPoint(x, xdot)
    m = MetricField(4, lambda y: np.diag([1.0 + y[1] ** 2, -1.0, -2.0 - math.sin(y[0]), -1.0]))
    assert theta_dot(m, v) == 2 * kinetic_energy(m, v)


@settings(max_examples=50)
@given(st.lists(finite, min_size=3, max_size=3), st.integers(0, 2**32 - 1))
def test_raise_then_lower_round_trip(comps, seed):
    r = np.random.default_rng(seed)
    A = r.uniform(-0.3, 0.3, (3, 3))
    base = np.diag(r.choice([-1.0, 1.0], 3)) + A + A.T
    m = MetricField(3, lambda y: base + np.outer(y, y) * 0.1)
    x = r.uniform(-1, 1, 3)
    cond = np.linalg.cond(m.at(x))
    assume(cond < 1e6)
    back = lower_index(m, raise_index(m, comps, x), x)
    np.testing.assert_allclose(back, comps, rtol=1e-12, atol=1e-15 * cond * max(1.0, max(map(abs, comps))))
