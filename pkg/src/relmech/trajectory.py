"""Parameterised solution curves lifted to TM, with dense output."""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .geometry import TangentPoint


def _quintic_hermite(h, s, p0, p1, v0, v1, a0, a1):
    """Quintic Hermite value and t-derivative at ``s = (t - t0)/h`` in [0, 1].

    Matches position, velocity and acceleration at both ends.
    """
    s2 = s * s
    s3 = s2 * s
    s4 = s3 * s
    s5 = s4 * s
    value = (
        (1 - 10 * s3 + 15 * s4 - 6 * s5) * p0
        + (10 * s3 - 15 * s4 + 6 * s5) * p1
        + h * ((s - 6 * s3 + 8 * s4 - 3 * s5) * v0 + (-4 * s3 + 7 * s4 - 3 * s5) * v1)
        + h * h * ((0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5) * a0 + (0.5 * s3 - s4 + 0.5 * s5) * a1)
    )
    rate = (
        (-30 * s2 + 60 * s3 - 30 * s4) * (p0 - p1) / h
        + (1 - 18 * s2 + 32 * s3 - 15 * s4) * v0
        + (-12 * s2 + 28 * s3 - 15 * s4) * v1
        + h * ((s - 4.5 * s2 + 6 * s3 - 2.5 * s4) * a0 + (1.5 * s2 - 4 * s3 + 2.5 * s4) * a1)
    )
    return value, rate


def _cubic_hermite(h, s, y0, y1, d0, d1):
    s2 = s * s
    s3 = s2 * s
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1


class Trajectory:
    """Ordered samples ``(t, x, xdot)`` of a lifted curve.

    Between samples the position is the quintic Hermite interpolant of the
    ``(x, xdot, xddot)`` endpoint data.  The velocity comes from ``velocity_dense``
    (per-step coefficients of a Runge-Kutta continuous extension) when given,
    else from the cubic Hermite interpolant of ``(xdot, xddot)``; a missing
    ``xddot`` is estimated from the samples.  A trajectory built from a closed
    form (or as the image of another trajectory) carries an ``evaluator`` ``t -> (x, xdot, dx/dt)`` that
    replaces interpolation.

    ``position_rate(t)`` is the derivative of the base curve, computed
    independently of the stored velocity; the two agree only on a genuine lift.
    """

    def __init__(self, t, x, xdot, xddot=None, evaluator: Optional[Callable] = None, stats=None, velocity_dense=None):
        t = np.asarray(t, dtype=float)
        x = np.atleast_2d(np.asarray(x, dtype=float))
        xdot = np.atleast_2d(np.asarray(xdot, dtype=float))
        if t.ndim != 1 or t.size < 2:
            raise ValueError("a trajectory needs at least two samples")
        if x.shape != (t.size, xdot.shape[1]) or xdot.shape[0] != t.size:
            raise ValueError("sample arrays have inconsistent shapes")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if xddot is None:
            xddot = np.gradient(xdot, t, axis=0, edge_order=2) if t.size > 2 else np.zeros_like(xdot)
        xddot = np.asarray(xddot, dtype=float)
        for a in (t, x, xdot, xddot):
            a.setflags(write=False)
        self.t, self.x, self.xdot, self.xddot = t, x, xdot, xddot
        self.evaluator = evaluator
        if velocity_dense is not None:
            velocity_dense = np.asarray(velocity_dense, dtype=float)
            if velocity_dense.shape != (t.size - 1, 5, xdot.shape[1]):
                raise ValueError("velocity_dense must have shape (steps, 5, dim)")
            velocity_dense.setflags(write=False)
        self.velocity_dense = velocity_dense
        self.stats = dict(stats or {})

    @classmethod
    def from_closed_form(cls, fn, t0, t1, n_samples=257, stats=None):
        """``fn(t) -> (x, xdot, xddot)``; positions and velocities are exact everywhere."""
        ts = np.linspace(t0, t1, n_samples)
        rows = [fn(s) for s in ts]
        x, xdot, xddot = (np.array([r[k] for r in rows], dtype=float) for k in range(3))

        def evaluator(s):
            px, pv, _ = fn(s)
            pv = np.asarray(pv, dtype=float)
            return np.asarray(px, dtype=float), pv, pv

        return cls(ts, x, xdot, xddot, evaluator=evaluator, stats=stats)

    @property
    def dim(self):
        return self.x.shape[1]

    @property
    def t0(self):
        return float(self.t[0])

    @property
    def t1(self):
        return float(self.t[-1])

    def __len__(self):
        return self.t.size

    def points(self):
        return [TangentPoint(x, v) for x, v in zip(self.x, self.xdot)]

    def segment(self, s) -> int:
        i = int(np.searchsorted(self.t, s, side="right")) - 1
        return min(max(i, 0), self.t.size - 2)

    def _eval(self, s, seg=None):
        if self.evaluator is not None:
            return self.evaluator(s)
        i = self.segment(s) if seg is None else seg
        h = self.t[i + 1] - self.t[i]
        u = (s - self.t[i]) / h
        x, rate = _quintic_hermite(
            h, u, self.x[i], self.x[i + 1], self.xdot[i], self.xdot[i + 1], self.xddot[i], self.xddot[i + 1]
        )
        if self.velocity_dense is not None:
            r = self.velocity_dense[i]
            u1 = 1.0 - u
            v = r[0] + u * (r[1] + u1 * (r[2] + u * (r[3] + u1 * r[4])))
        else:
            v = _cubic_hermite(h, u, self.xdot[i], self.xdot[i + 1], self.xddot[i], self.xddot[i + 1])
        return x, v, rate

    def state(self, s, seg=None) -> TangentPoint:
        x, v, _ = self._eval(s, seg)
        return TangentPoint(x, v)

    def position_rate(self, s, seg=None) -> np.ndarray:
        return self._eval(s, seg)[2]

    def lift(self, s, seg=None):
        """``(x, xdot, dx/dt)`` at parameter value ``s``."""
        return self._eval(s, seg)

    def endpoint(self) -> TangentPoint:
        return TangentPoint(self.x[-1], self.xdot[-1])
