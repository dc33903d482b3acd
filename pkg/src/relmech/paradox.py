"""Twin-paradox example on Minkowski R^4 (c = 1, unit mass, unit charge).

A charged particle in a unit magnetic field along the x^3 axis and a free
particle both leave ``A = (0, eta, 0, 0)`` and meet again at
``B = (lambda*pi, -eta, 0, 0)``.  Both trajectories are parameterised by proper
time, so each one's duration equals its proper time, but the two proper
times differ.  A single mechanical system carrying both particles would force
the two durations to coincide.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import geodesic_equation, integrate, newton_equation
from .errors import DomainError
from .forces import TwoForm, lorentz_force
from .geometry import MetricField, TangentPoint
from .timeflow import CanonicalTheta, duration, is_strictly_relativistic, proper_time
from .trajectory import Trajectory

STRICT_TOL = 1e-9
ENDPOINT_TOL = 1e-9
_SMALL_S = 1e-3


def appendix_constants(eta):
    """``(lambda, mu)`` making both trajectories strictly relativistic."""
    lam = math.sqrt(1.0 + eta * eta)
    mu = 1.0 / math.sqrt(1.0 - 4.0 * eta * eta / (math.pi ** 2 * (1.0 + eta * eta)))
    return lam, mu


def minkowski():
    return MetricField.minkowski(4)


def magnetic_field():
    """``F_12 = 1/2``, giving ``alpha = xdot^1 dx^2 - xdot^2 dx^1``."""
    upper = np.zeros((4, 4))
    upper[1, 2] = 0.5
    return TwoForm.constant(upper)


def charged_system():
    return newton_equation(minkowski(), lorentz_force(magnetic_field()))


def point_a(eta):
    return np.array([0.0, eta, 0.0, 0.0])


def point_b(eta):
    lam, _ = appendix_constants(eta)
    return np.array([lam * math.pi, -eta, 0.0, 0.0])


def gamma_prime(eta, lam=None, n_samples=257) -> Trajectory:
    """Helix ``(lam t, eta cos t, eta sin t, 0)`` on ``[0, pi]``.

    ``lam`` defaults to the strict value ``sqrt(1 + eta^2)``.
    """
    if lam is None:
        lam, _ = appendix_constants(eta)

    def fn(t):
        c, s = math.cos(t), math.sin(t)
        return (
            (lam * t, eta * c, eta * s, 0.0),
            (lam, -eta * s, eta * c, 0.0),
            (0.0, -eta * c, -eta * s, 0.0),
        )

    return Trajectory.from_closed_form(fn, 0.0, math.pi, n_samples, stats={"closed_form": "gamma_prime"})


def doubleprime_velocity(eta):
    lam, mu = appendix_constants(eta)
    return np.array([mu, -2.0 * mu * eta / (math.pi * lam), 0.0, 0.0])


def gamma_doubleprime(eta, n_samples=257) -> Trajectory:
    """Straight line from A to B traversed in time ``lambda*pi/mu``."""
    lam, mu = appendix_constants(eta)
    v = doubleprime_velocity(eta)
    a = point_a(eta)

    def fn(t):
        return a + v * t, v, np.zeros(4)

    return Trajectory.from_closed_form(fn, 0.0, lam * math.pi / mu, n_samples, stats={"closed_form": "gamma_doubleprime"})


def k_c(eta, s):
    """Speed ``sqrt|theta_dot|`` of the straight line reaching ``gamma_prime(s)`` at time ``s``."""
    if not 0.0 < s <= math.pi:
        raise DomainError(f"s must lie in (0, pi], got {s!r}")
    if s < _SMALL_S:
        s2 = s * s
        ratio = 1.0 - s2 / 12.0 + s2 * s2 / 360.0
    else:
        # 2(1 - cos s)/s^2 written without cancellation
        ratio = (math.sin(0.5 * s) / (0.5 * s)) ** 2
    return math.sqrt(1.0 + eta * eta * (1.0 - ratio))


def gamma_c(eta, s, n_samples=65):
    """The line from A to ``C = gamma_prime(s)`` with duration ``s``, and its speed ``k_C``."""
    kc = k_c(eta, s)
    lam, _ = appendix_constants(eta)
    half = math.sin(0.5 * s)
    v = np.array([lam, -2.0 * eta * half * half / s, eta * math.sin(s) / s, 0.0])
    a = point_a(eta)

    def fn(t):
        return a + v * t, v, np.zeros(4)

    return Trajectory.from_closed_form(fn, 0.0, s, n_samples, stats={"closed_form": "gamma_c", "s": s}), kc


@dataclass(frozen=True)
class ParadoxReport:
    eta: float
    mode: str
    lambda_: float
    mu: float
    duration_prime: float
    duration_doubleprime: float
    proper_prime: float
    proper_doubleprime: float
    strict_prime: bool
    strict_doubleprime: bool
    mismatch: float
    endpoints_agree: bool

    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d


def integrated_prime(eta, rel_tol=1e-12, abs_tol=1e-12) -> Trajectory:
    lam, _ = appendix_constants(eta)
    init = TangentPoint(point_a(eta), [lam, 0.0, eta, 0.0])
    return integrate(charged_system(), init, 0.0, math.pi, rel_tol, abs_tol)


def integrated_doubleprime(eta, rel_tol=1e-12, abs_tol=1e-12) -> Trajectory:
    lam, mu = appendix_constants(eta)
    init = TangentPoint(point_a(eta), doubleprime_velocity(eta))
    return integrate(geodesic_equation(minkowski()), init, 0.0, lam * math.pi / mu, rel_tol, abs_tol)


def paradox_report(eta, mode="closed_form") -> ParadoxReport:
    """Durations and proper times of both trajectories.

    ``mode`` is ``"closed_form"`` (exact curves) or ``"integrated"`` (curves
    obtained by integrating the charged and free equations of motion).
    """
    if mode in ("closed", "closed_form"):
        mode = "closed_form"
        prime, dprime = gamma_prime(eta), gamma_doubleprime(eta)
    elif mode == "integrated":
        prime, dprime = integrated_prime(eta), integrated_doubleprime(eta)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    m = minkowski()
    lam, mu = appendix_constants(eta)
    clock = CanonicalTheta(m)
    d1, d2 = duration(prime, clock), duration(dprime, clock)
    b = point_b(eta)
    a = point_a(eta)
    endpoints = max(
        np.max(np.abs(prime.x[0] - a)),
        np.max(np.abs(dprime.x[0] - a)),
        np.max(np.abs(prime.x[-1] - b)),
        np.max(np.abs(dprime.x[-1] - b)),
    )
    return ParadoxReport(
        eta=float(eta),
        mode=mode,
        lambda_=lam,
        mu=mu,
        duration_prime=d1,
        duration_doubleprime=d2,
        proper_prime=float(proper_time(prime, m)),
        proper_doubleprime=float(proper_time(dprime, m)),
        strict_prime=is_strictly_relativistic(prime, m, STRICT_TOL)[0],
        strict_doubleprime=is_strictly_relativistic(dprime, m, STRICT_TOL)[0],
        mismatch=abs(d1 - d2),
        endpoints_agree=bool(endpoints <= ENDPOINT_TOL),
    )
