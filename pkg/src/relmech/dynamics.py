"""Equations of motion of a mechanical system ``(M, T2, alpha)``.

The Newton equation in coordinates reads

    xddot^j + Gamma^j_kl xdot^k xdot^l + alpha^j = 0,    alpha^j = g^ij alpha_i

and :func:`newton_equation` turns a metric and a force form into the
acceleration map.  :func:`integrate` solves it with an adaptive Dormand-Prince
5(4) pair.  The residual functions re-derive the equation of motion from the
symplectic form by finite differences and serve as independent validators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _fd
from .errors import StepSizeUnderflow
from .forces import ForceForm, ScalarField, zero_force
from .geometry import (
    MetricField,
    TangentPoint,
    christoffel,
    kinetic_energy,
    metric_inverse,
)
from .trajectory import Trajectory


@dataclass(frozen=True)
class SecondOrderEq:
    """Acceleration map ``(x, xdot) -> xddot``.

    The induced field on TM is ``xdot^j d/dx^j + accel^j d/dxdot^j``; its
    x-components are the velocity by construction, so two equations on the
    same space always differ by a vertical field.
    """

    dim: int
    accel: Callable[[np.ndarray, np.ndarray], np.ndarray]
    metric: Optional[MetricField] = field(default=None, compare=False)
    force: Optional[ForceForm] = field(default=None, compare=False)

    def __call__(self, x, xdot) -> np.ndarray:
        return np.asarray(self.accel(np.asarray(x, dtype=float), np.asarray(xdot, dtype=float)), dtype=float)

    def field(self, v: TangentPoint) -> np.ndarray:
        """Components of the field on TM at ``v``: ``(xdot, accel)``."""
        return np.concatenate([v.xdot, self(v.x, v.xdot)])


@dataclass(frozen=True)
class VectorField:
    """A tangent field ``u(x)`` on the configuration space."""

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    partials: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)


def newton_equation(m: MetricField, f: ForceForm) -> SecondOrderEq:
    if f.dim != m.dim:
        raise ValueError("metric and force dimensions differ")

    if m.is_constant:
        ginv = metric_inverse(m, np.zeros(m.dim))

        def flat_accel(x, xdot):
            return -(ginv @ f(x, xdot))

        return SecondOrderEq(m.dim, flat_accel, m, f)

    def accel(x, xdot):
        gamma = christoffel(m, x)
        raised = metric_inverse(m, x) @ f(x, xdot)
        return -np.einsum("jkl,k,l->j", gamma, xdot, xdot) - raised

    return SecondOrderEq(m.dim, accel, m, f)


def geodesic_equation(m: MetricField) -> SecondOrderEq:
    return newton_equation(m, zero_force(m.dim))


# Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, Solving ODEs I).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th order weights and the embedded 4th order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension of order 4 (Hairer's contd5)
_D = np.array(
    [
        -12715105075 / 11282082432,
        0.0,
        87487479700 / 32700410799,
        -10690763975 / 1880347072,
        701980252875 / 199316789632,
        -1453857185 / 822651844,
        69997945 / 29380423,
    ]
)

ORDER = 5
_SAFE = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_BETA = 0.04
_EXPO = 1.0 / ORDER - 0.75 * _BETA


def _error_norm(err, y0, y1, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return math.sqrt(float(np.mean((err / scale) ** 2)))


def _initial_step(rhs, t0, y0, f0, span, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = rhs(y0 + h0 * f0)
    d2 = math.sqrt(float(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / ORDER)
    return min(100 * h0, h1, span)


def integrate(eq: SecondOrderEq, init: TangentPoint, t0, t1, rel_tol=1e-8, abs_tol=1e-10, max_steps=200_000) -> Trajectory:
    """Solve ``xddot = accel(x, xdot)`` on ``[t0, t1]`` from ``init``.

    Adaptive Dormand-Prince 5(4) with local extrapolation and a PI step-size
    controller; the local error is measured on the combined ``(x, xdot)``
    state.  The last step is shortened so that ``t1`` is hit exactly.

    Dense output: positions are quintic Hermite on the ``(x, xdot, xddot)`` step data,
    velocities use the method's own 4th order continuous extension.
    """
    t0 = float(t0)
    t1 = float(t1)
    if not t1 > t0:
        raise ValueError("integration interval must satisfy t1 > t0")
    n = eq.dim
    if init.dim != n:
        raise ValueError("initial point has the wrong dimension")

    n_evals = 0

    def rhs(y):
        nonlocal n_evals
        n_evals += 1
        return np.concatenate([y[n:], eq(y[:n], y[n:])])

    y = np.concatenate([init.x, init.xdot])
    k1 = rhs(y)
    ts, ys, dys, dense = [t0], [y], [k1], []
    h = _initial_step(rhs, t0, y, k1, t1 - t0, rel_tol, abs_tol)
    t = t0
    err_old = 1e-4
    n_rejected = 0
    last_rejected = False
    k = [None] * 7
    while t < t1:
        if len(ts) > max_steps:
            raise StepSizeUnderflow(f"more than {max_steps} steps needed")
        if h < 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise StepSizeUnderflow(f"step size {h:.3e} underflow at t={t:.17g}")
        final = t + h >= t1 or t1 - (t + h) < 1e-12 * max(1.0, abs(t1))
        if final:
            h = t1 - t
        k[0] = k1
        for i in range(1, 7):
            incr = sum(a * kj for a, kj in zip(_A[i], k[:i]))
            k[i] = rhs(y + h * incr)
        y_new = y + h * sum(b * kj for b, kj in zip(_B, k) if b != 0.0)
        err_vec = h * sum(e * kj for e, kj in zip(_E, k) if e != 0.0)
        err = _error_norm(err_vec, y, y_new, rel_tol, abs_tol)
        if not np.isfinite(err) or not np.all(np.isfinite(y_new)):
            n_rejected += 1
            last_rejected = True
            h *= _FAC_MIN
            continue
        fac11 = err ** _EXPO if err > 0 else 0.0
        if err <= 1.0:
            fac = fac11 / err_old ** _BETA
            fac = min(1 / _FAC_MIN, max(1 / _FAC_MAX, fac / _SAFE))
            h_new = h / fac if fac > 0 else h * _FAC_MAX
            if last_rejected:
                h_new = min(h_new, h)
            err_old = max(err, 1e-4)
            t = t1 if final else t + h
            ydiff = y_new - y
            bspl = h * k[0] - ydiff
            dense.append([y, ydiff, bspl, ydiff - h * k[6] - bspl, h * sum(d * kj for d, kj in zip(_D, k) if d != 0.0)])
            y = y_new
            k1 = k[6]
            ts.append(t)
            ys.append(y)
            dys.append(k1)
            last_rejected = False
            h = h_new
        else:
            n_rejected += 1
            last_rejected = True
            h /= min(1 / _FAC_MIN, fac11 / _SAFE)

    ys = np.array(ys)
    dys = np.array(dys)
    stats = {
        "steps": len(ts) - 1,
        "rejected": n_rejected,
        "evaluations": n_evals,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
    }
    dense = np.array(dense)[:, :, n:]
    return Trajectory(ts, ys[:, :n], ys[:, n:], dys[:, n:], velocity_dense=dense, stats=stats)


def energy_drift(tr: Trajectory, m: MetricField) -> float:
    energies = np.array([kinetic_energy(m, v) for v in tr.points()])
    return float(np.max(np.abs(energies - energies[0])))


def newton_residual(m: MetricField, f: ForceForm, eq: SecondOrderEq, v: TangentPoint) -> np.ndarray:
    """``D _| omega2 + dT + alpha`` in the ``(x, xdot)`` chart, 2n components.

    ``omega2 = dp_i ^ dx^i`` with ``p_i = g_ij xdot^j``; the differentials of
    ``p`` and ``T`` are taken by central differences in all 2n variables, so
    this does not share a code path with :func:`newton_equation`.
    """
    n = m.dim
    z = np.concatenate([v.x, v.xdot])

    def p_of(zz):
        return m.at(zz[:n]) @ zz[n:]

    def T_of(zz):
        return 0.5 * float(zz[n:] @ m.at(zz[:n]) @ zz[n:])

    dp = _fd.jacobian(p_of, z)  # dp[i, a] = d p_i / d z^a
    dT = _fd.gradient(T_of, z)
    D = eq.field(v)
    xdot = v.xdot
    # D _| (dp_i ^ dx^i) = (D p_i) dx^i - xdot^i dp_i
    Dp = dp @ D
    contraction = -(xdot @ dp)
    contraction[:n] += Dp
    residual = contraction + dT
    residual[:n] += f.at(v)
    return residual


def intermediate_integral_residual(m: MetricField, f: ForceForm, u: VectorField, x) -> np.ndarray:
    """``u _| d(u _| T2) + d(T(u)) + u*alpha`` at ``x``.

    ``u*alpha`` substitutes ``xdot := u(x)`` into the force components.
    """
    x = np.asarray(x, dtype=float)

    def beta(y):
        return m.at(y) @ u(y)

    def T_of_u(y):
        uy = u(y)
        return 0.5 * float(uy @ m.at(y) @ uy)

    db = _fd.jacobian(beta, x)  # db[j, k] = d beta_j / d x^k
    ux = u(x)
    # (u _| d beta)_m = u^k d_k beta_m - u^j d_m beta_j
    curl_term = db @ ux - ux @ db
    return curl_term + _fd.gradient(T_of_u, x) + f(x, ux)


def hamiltonian(m: MetricField, U: ScalarField, v: TangentPoint) -> float:
    return kinetic_energy(m, v) + U(v.x)


def hj_residual(m: MetricField, U: ScalarField, S: ScalarField, x, E) -> float:
    """``1/2 g^jk dS_j dS_k + U(x) - E``."""
    dS = S.grad(x)
    return float(0.5 * dS @ metric_inverse(m, x) @ dS + U(x) - E)


def proper_rate_spread(tr: Trajectory, m: MetricField) -> float:
    """Standard deviation of ``sqrt|theta_dot|`` over the samples."""
    rates = np.sqrt(np.abs([2.0 * kinetic_energy(m, v) for v in tr.points()]))
    return float(np.std(rates))
