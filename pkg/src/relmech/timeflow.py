"""Durations, proper time and pushforwards of trajectories.

Every horizontal 1-form ``tau`` with ``tau_dot = 1`` restricts to ``dt`` on a
lifted curve, so the duration of a solution is its parameter span whichever
representative is used.  Two representatives are provided: ``theta/theta_dot``
(needs a metric) and ``df/fdot`` for a coordinate clock ``f``.  The duration is
computed by quadrature of the representative along the lift, evaluated on the
curve derivative ``dx/dt`` independently of the stored velocity; it is not
assumed to equal the span.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from . import _fd
from .errors import ClockStalls, ZeroSectionOrLightlike
from .forces import ScalarField
from .geometry import LIGHTLIKE_TOL, MetricField, TangentPoint
from .trajectory import Trajectory

log = logging.getLogger(__name__)

QUAD_TOL = 1e-10
CLOCK_TOL = 1e-12
ZERO_SECTION_TOL = 1e-12


def adaptive_simpson(fn, a, b, tol=QUAD_TOL, max_depth=50):
    """Integrate ``fn`` over ``[a, b]`` to absolute tolerance ``tol``."""
    fa, fm, fb = fn(a), fn(0.5 * (a + b)), fn(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    return _simpson(fn, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson(fn, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = fn(lm), fn(rm)
    left = (m - a) * (fa + 4 * flm + fm) / 6
    right = (b - m) * (fm + 4 * frm + fb) / 6
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15 * tol:
        return left + right + delta / 15
    return _simpson(fn, a, m, fa, flm, fm, left, tol / 2, depth - 1) + _simpson(
        fn, m, b, fm, frm, fb, right, tol / 2, depth - 1
    )


@dataclass(frozen=True)
class CanonicalTheta:
    """The representative ``theta / theta_dot``."""

    metric: MetricField
    tol: float = LIGHTLIKE_TOL

    def pair(self, x, xdot, rate):
        g = self.metric.at(x)
        q = float(xdot @ g @ xdot)
        if abs(q) <= self.tol:
            raise ZeroSectionOrLightlike(f"|theta_dot| = {abs(q):.3e} along the curve")
        return float(xdot @ g @ rate) / q


@dataclass(frozen=True)
class CoordinateClock:
    """The representative ``df / fdot`` for a function ``f`` with ``fdot != 0``."""

    f: ScalarField
    tol: float = CLOCK_TOL

    def pair(self, x, xdot, rate):
        grad = self.f.grad(x)
        fdot = float(grad @ xdot)
        if abs(fdot) <= self.tol:
            raise ClockStalls(f"|fdot| = {abs(fdot):.3e} along the curve")
        return float(grad @ rate) / fdot


TimeFormChoice = Union[CanonicalTheta, CoordinateClock]


def _segment_quadrature(tr: Trajectory, integrand, tol):
    span = tr.t1 - tr.t0
    total = 0.0
    for i in range(len(tr) - 1):
        a, b = float(tr.t[i]), float(tr.t[i + 1])
        total += float(adaptive_simpson(lambda s: integrand(s, i), a, b, tol * (b - a) / span))
    return total


def duration(tr: Trajectory, choice: TimeFormChoice, tol=QUAD_TOL) -> float:
    """Integral of the time form ``choice`` along the lift of ``tr``."""

    def integrand(s, seg):
        x, xdot, rate = tr.lift(s, seg)
        return choice.pair(x, xdot, rate)

    return _segment_quadrature(tr, integrand, tol)


def proper_time(tr: Trajectory, m: MetricField, tol=QUAD_TOL, lightlike_tol=LIGHTLIKE_TOL) -> float:
    """Integral of ``sqrt|theta_dot|`` along ``tr``."""

    def integrand(s, seg):
        x, xdot, _ = tr.lift(s, seg)
        q = float(xdot @ m.at(x) @ xdot)
        if abs(q) <= lightlike_tol:
            raise ZeroSectionOrLightlike(f"|theta_dot| = {abs(q):.3e} at t={s:.17g}")
        return np.sqrt(abs(q))

    return _segment_quadrature(tr, integrand, tol)


def cumulative_proper_time(tr: Trajectory, m: MetricField, tol=QUAD_TOL, lightlike_tol=LIGHTLIKE_TOL):
    """Proper time elapsed at every sample; ``nan`` from the first lightlike sample on."""
    out = np.full(len(tr), np.nan)
    out[0] = 0.0
    for i in range(len(tr) - 1):
        a, b = float(tr.t[i]), float(tr.t[i + 1])

        def integrand(s, seg=i):
            x, xdot, _ = tr.lift(s, seg)
            q = float(xdot @ m.at(x) @ xdot)
            if abs(q) <= lightlike_tol:
                raise ZeroSectionOrLightlike
            return np.sqrt(abs(q))

        try:
            out[i + 1] = out[i] + adaptive_simpson(integrand, a, b, tol * (b - a) / (tr.t1 - tr.t0))
        except ZeroSectionOrLightlike:
            break
    return out


def is_strictly_relativistic(tr: Trajectory, m: MetricField, tol=1e-9):
    """``(max | |theta_dot| - 1 | <= tol, that maximum)`` over the samples."""
    dev = max(abs(abs(float(v @ m.at(x) @ v)) - 1.0) for x, v in zip(tr.x, tr.xdot))
    return dev <= tol, dev


@dataclass(frozen=True)
class SmoothMap:
    """A smooth map ``phi: R^dim_in -> R^dim_out`` with Jacobian ``(dim_out, dim_in)``."""

    dim_in: int
    dim_out: int
    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: Optional[float] = None

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float).reshape(self.dim_out)

    def jac(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float).reshape(self.dim_out, self.dim_in)
        return _fd.jacobian(self, x, self.fd_step)

    def push(self, v: TangentPoint) -> TangentPoint:
        return TangentPoint(self(v.x), self.jac(v.x) @ v.xdot)

    @classmethod
    def linear(cls, matrix, offset=None):
        A = np.array(matrix, dtype=float)
        b = np.zeros(A.shape[0]) if offset is None else np.asarray(offset, dtype=float)
        return cls(A.shape[1], A.shape[0], lambda x: A @ x + b, lambda x: A)


def pushforward_trajectory(phi: SmoothMap, tr: Trajectory, zero_tol=ZERO_SECTION_TOL) -> Trajectory:
    """Image ``(t, phi(x(t)), J(x(t)) xdot(t))`` of ``tr`` on the same time grid.

    Never fails on a degenerate image.  ``stats["zero_section_hit"]`` is set when
    the image velocity vanishes (norm <= ``zero_tol``) at a sample or at a
    segment midpoint, and ``stats["min_image_speed"]`` records the smallest
    image speed seen.
    """
    if phi.dim_in != tr.dim:
        raise ValueError("map input dimension does not match the trajectory")

    def evaluator(s):
        x, xdot, rate = tr.lift(s)
        J = phi.jac(x)
        return phi(x), J @ xdot, J @ rate

    ys, vs = [], []
    for x, v in zip(tr.x, tr.xdot):
        J = phi.jac(x)
        ys.append(phi(x))
        vs.append(J @ v)
    speeds = [float(np.linalg.norm(v)) for v in vs]
    mids = 0.5 * (tr.t[:-1] + tr.t[1:])
    speeds += [float(np.linalg.norm(evaluator(s)[1])) for s in mids]
    min_speed = min(speeds)
    stats = {"zero_section_hit": bool(min_speed <= zero_tol), "min_image_speed": min_speed}
    xddot = np.zeros((len(tr), phi.dim_out))
    return Trajectory(tr.t, ys, vs, xddot, evaluator=evaluator, stats=stats)


@dataclass(frozen=True)
class PushforwardReport:
    duration_src: float
    duration_img: float
    zero_section_hit: bool
    min_image_speed: float
    tol: float

    @property
    def difference(self):
        return abs(self.duration_src - self.duration_img)

    @property
    def agree(self):
        """Agreement within ``tol``; meaningless (False) when the image hits the 0-section."""
        return not self.zero_section_hit and self.difference <= self.tol


def duration_invariance_check(phi: SmoothMap, tr: Trajectory, f_src: ScalarField, f_img: ScalarField, tol=1e-8) -> PushforwardReport:
    img = pushforward_trajectory(phi, tr)
    d_src = duration(tr, CoordinateClock(f_src))
    d_img = duration(img, CoordinateClock(f_img))
    if img.stats["zero_section_hit"]:
        log.info("image curve meets the zero section (min speed %.3e)", img.stats["min_image_speed"])
    return PushforwardReport(d_src, d_img, img.stats["zero_section_hit"], img.stats["min_image_speed"], tol)
