import math

import numpy as np
import pytest

from relmech.dynamics import geodesic_equation, integrate
from relmech.errors import ClockStalls, ZeroSectionOrLightlike
from relmech.forces import ScalarField
from relmech.geometry import MetricField, TangentPoint
from relmech.paradox import gamma_doubleprime, gamma_prime, integrated_prime
from relmech.timeflow import (
    CanonicalTheta,
    CoordinateClock,
    SmoothMap,
    adaptive_simpson,
    cumulative_proper_time,
    duration,
    duration_invariance_check,
    is_strictly_relativistic,
    proper_time,
    pushforward_trajectory,
)
from relmech.trajectory import Trajectory

from conftest import ETA, LAM, MU

MINK = MetricField.minkowski()
X0 = ScalarField.coordinate(4, 0)


def line(v, t1=1.0, x0=None):
    v = np.asarray(v, dtype=float)
    x0 = np.zeros(v.size) if x0 is None else np.asarray(x0, dtype=float)
    return Trajectory.from_closed_form(lambda t: (x0 + v * t, v, np.zeros(v.size)), 0.0, t1, 17)


def test_adaptive_simpson():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)
    assert adaptive_simpson(lambda s: s ** 3, 0.0, 2.0) == pytest.approx(4.0, abs=1e-14)


def test_duration_examples():
    assert duration(gamma_prime(ETA), CanonicalTheta(MINK)) == pytest.approx(math.pi, abs=1e-9)
    assert duration(gamma_doubleprime(ETA), CanonicalTheta(MINK)) == pytest.approx(LAM * math.pi / MU, abs=1e-9)
    assert duration(gamma_doubleprime(ETA), CanonicalTheta(MINK)) == pytest.approx(3.9672671705065, abs=1e-9)
    assert duration(gamma_prime(ETA), CoordinateClock(X0)) == pytest.approx(math.pi, abs=1e-9)


def test_duration_guards():
    with pytest.raises(ZeroSectionOrLightlike):
        duration(line([1.0, 1.0, 0.0, 0.0]), CanonicalTheta(MINK))
    with pytest.raises(ClockStalls):
        duration(line([0.0, 1.0, 0.0, 0.0]), CoordinateClock(X0))


def test_duration_of_a_non_lift_differs():
    """The position rate is independent of the stored velocity: a fake lift gives the wrong duration."""
    fn = lambda t: (np.array([2.0 * t, 0.0]), np.array([1.0, 0.0]), np.zeros(2))
    tr = Trajectory.from_closed_form(fn, 0.0, 1.0)
    tr = Trajectory(tr.t, tr.x, tr.xdot)  # drop the evaluator, keep inconsistent samples
    assert duration(tr, CanonicalTheta(MetricField.euclidean(2))) == pytest.approx(2.0, abs=1e-9)


def test_proper_time_examples():
    assert proper_time(gamma_prime(ETA), MINK) == pytest.approx(math.pi, abs=1e-9)
    assert proper_time(gamma_prime(ETA, lam=2.0), MINK) == pytest.approx(math.sqrt(3) * math.pi, abs=1e-9)
    with pytest.raises(ZeroSectionOrLightlike):
        proper_time(line([1.0, -1.0, 0.0, 0.0]), MINK)


def test_cumulative_proper_time():
    tau = cumulative_proper_time(gamma_prime(ETA), MINK)
    np.testing.assert_allclose(tau, gamma_prime(ETA).t, atol=1e-9)
    assert np.all(np.isnan(cumulative_proper_time(line([1.0, 1.0, 0.0, 0.0]), MINK)[1:]))


def test_strictness_examples():
    assert is_strictly_relativistic(gamma_prime(ETA), MINK, 1e-9)[0]
    ok, dev = is_strictly_relativistic(gamma_prime(ETA, lam=2.0), MINK, 1e-9)
    assert not ok and dev == pytest.approx(2.0, abs=1e-12)
    E3 = MetricField.euclidean(3)
    geo = integrate(geodesic_equation(E3), TangentPoint(np.zeros(3), [0.6, 0.8, 0.0]), 0.0, 2.0)
    assert is_strictly_relativistic(geo, E3, 1e-9)[0]


def test_proper_time_reparametrization():
    E2 = MetricField.euclidean(2)
    for k in (0.5, 2.0, 3.0):
        tr = integrate(geodesic_equation(E2), TangentPoint([0.0, 0.0], [k * 0.6, k * 0.8]), 0.0, 1.0)
        assert proper_time(tr, E2) == pytest.approx(k, abs=1e-9)


def test_clock_congruence_and_parameter_span(rng):
    trs = [gamma_prime(ETA), gamma_doubleprime(ETA), integrated_prime(ETA, 1e-10, 1e-12)]
    for tr in trs:
        d_theta = duration(tr, CanonicalTheta(MINK))
        d_clock = duration(tr, CoordinateClock(X0))
        assert abs(d_theta - d_clock) <= 1e-9
        assert abs(d_theta - (tr.t1 - tr.t0)) <= 1e-9
        if is_strictly_relativistic(tr, MINK, 1e-9)[0]:
            assert abs(proper_time(tr, MINK) - d_theta) <= 1e-9


def test_pushforward_identity():
    tr = gamma_prime(ETA)
    img = pushforward_trajectory(SmoothMap.linear(np.eye(4)), tr)
    np.testing.assert_array_equal(img.x, tr.x)
    np.testing.assert_array_equal(img.xdot, tr.xdot)
    assert not img.stats["zero_section_hit"]


def test_pushforward_projection():
    proj = SmoothMap.linear(np.eye(4)[:2])
    img = pushforward_trajectory(proj, gamma_prime(ETA))
    t = img.t
    np.testing.assert_allclose(img.x, np.column_stack([LAM * t, ETA * np.cos(t)]), atol=1e-15)
    np.testing.assert_allclose(img.xdot, np.column_stack([np.full_like(t, LAM), -ETA * np.sin(t)]), atol=1e-15)
    assert not img.stats["zero_section_hit"]
    assert img.stats["min_image_speed"] >= LAM - 1e-12


def test_pushforward_constant_map_hits_zero_section():
    const = SmoothMap(4, 2, lambda x: np.array([1.0, 2.0]))
    img = pushforward_trajectory(const, gamma_prime(ETA))
    assert img.stats["zero_section_hit"]
    assert not np.any(img.xdot)


def test_duration_invariance_examples():
    proj = SmoothMap.linear(np.eye(4)[:2])
    rep = duration_invariance_check(proj, gamma_prime(ETA), X0, ScalarField.coordinate(2, 0), tol=1e-9)
    assert rep.agree and rep.duration_src == pytest.approx(math.pi, abs=1e-9)
    ident = SmoothMap.linear(np.eye(4))
    f = ScalarField(4, lambda x: x[0] + 0.1 * x[1] ** 2)
    rep = duration_invariance_check(ident, gamma_prime(ETA), f, f)
    assert rep.difference == 0.0
    scale = SmoothMap.linear([[2.0, 0.0], [0.0, 1.0]])
    geo = line([1.0, 0.5], t1=3.0)
    x0 = ScalarField.coordinate(2, 0)
    rep = duration_invariance_check(scale, geo, x0, x0)
    assert rep.duration_src == pytest.approx(3.0, abs=1e-9)
    assert rep.duration_img == pytest.approx(3.0, abs=1e-9)


def test_duration_invariance_reports_zero_section():
    const = SmoothMap(4, 2, lambda x: np.array([1.0, 2.0]), lambda x: np.zeros((2, 4)))
    with pytest.raises(ClockStalls):
        duration_invariance_check(const, gamma_prime(ETA), X0, ScalarField.coordinate(2, 0))
