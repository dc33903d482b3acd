"""Force forms: horizontal 1-forms ``alpha = alpha_j(x, xdot) dx^j`` on TM.

Horizontality is structural here; a :class:`ForceForm` only produces the
``dx`` components.  The pairing with the velocity, ``alpha_dot = xdot^j alpha_j``,
decides contact-system membership: a force is relativistic exactly when
``alpha_dot`` vanishes identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

import numpy as np

from . import _fd
from .geometry import LIGHTLIKE_TOL, MetricField, TangentPoint, liouville_components, metric_inverse, theta_dot
from .errors import LightlikeVelocity

KINDS = ("zero", "exact", "lorentz", "custom", "corrected")


@dataclass(frozen=True)
class ScalarField:
    """A function on the configuration space (a potential ``U`` or an action ``S``)."""

    dim: int
    eval: Callable[[np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: Optional[float] = None

    def __call__(self, x) -> float:
        return float(self.eval(np.asarray(x, dtype=float)))

    def grad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.gradient is not None:
            return np.asarray(self.gradient(x), dtype=float)
        return _fd.gradient(self, x, self.fd_step)

    @classmethod
    def coordinate(cls, dim, k):
        """The coordinate function ``x^k``."""
        e = np.zeros(dim)
        e[k] = 1.0
        return cls(dim, lambda x: x[k], lambda x: e)


@dataclass(frozen=True)
class TwoForm:
    """``F = sum_{i<j} F_ij dx^i ^ dx^j``; only the strict upper triangle is read."""

    dim: int
    components: Callable[[np.ndarray], np.ndarray]

    def at(self, x) -> np.ndarray:
        upper = np.triu(np.asarray(self.components(np.asarray(x, dtype=float)), dtype=float), 1)
        return upper - upper.T

    @classmethod
    def constant(cls, upper):
        upper = np.triu(np.array(upper, dtype=float), 1)
        return cls(upper.shape[0], lambda x: upper)


@dataclass(frozen=True)
class ForceForm:
    dim: int
    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    kind: str = "custom"
    provenance: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown force kind {self.kind!r}")

    def __call__(self, x, xdot) -> np.ndarray:
        return np.asarray(self.eval(np.asarray(x, dtype=float), np.asarray(xdot, dtype=float)), dtype=float)

    def at(self, v: TangentPoint) -> np.ndarray:
        return self(v.x, v.xdot)


def zero_force(dim) -> ForceForm:
    zeros = np.zeros(dim)
    return ForceForm(dim, lambda x, xdot: zeros, kind="zero")


def custom_force(dim, fn) -> ForceForm:
    return ForceForm(dim, fn, kind="custom")


def alpha_dot(f: ForceForm, v: TangentPoint) -> float:
    return float(v.xdot @ f.at(v))


def lorentz_force(F: TwoForm) -> ForceForm:
    """``alpha = ddot _| F``: ``alpha_j = sum_i (F_ij - F_ji) xdot^i``.

    With ``F_12 = 1/2`` this is ``xdot^1 dx^2 - xdot^2 dx^1``, a unit magnetic
    field along the x^3 axis.
    """

    def eval_(x, xdot):
        A = F.at(x)
        return (A - A.T).T @ xdot

    return ForceForm(F.dim, eval_, kind="lorentz", provenance=F)


def conservative_force(U: ScalarField) -> ForceForm:
    return ForceForm(U.dim, lambda x, xdot: U.grad(x), kind="exact", provenance=U)


def is_contact(f: ForceForm, samples: Iterable[TangentPoint], tol=1e-12):
    """Return ``(max |alpha_dot| <= tol, max |alpha_dot|)`` over the samples."""
    worst = max(abs(alpha_dot(f, v)) for v in samples)
    return worst <= tol, worst


def relativistic_correction(f: ForceForm, m: MetricField, lightlike_tol=LIGHTLIKE_TOL) -> ForceForm:
    """``alpha - (alpha_dot / theta_dot) theta``, evaluated lazily."""

    def eval_(x, xdot):
        v = TangentPoint(x, xdot)
        a = f(x, xdot)
        q = theta_dot(m, v)
        if abs(q) <= lightlike_tol:
            raise LightlikeVelocity(f"relativistic correction undefined at |theta_dot| = {abs(q):.3e}")
        return a - (float(xdot @ a) / q) * liouville_components(m, v)

    return ForceForm(f.dim, eval_, kind="corrected", provenance=(f, m))


def raise_index(m: MetricField, c, x) -> np.ndarray:
    return metric_inverse(m, x) @ np.asarray(c, dtype=float)


def contact_generator(i, j, v: TangentPoint) -> np.ndarray:
    """Components of ``xdot^j dx^i - xdot^i dx^j`` at ``v``."""
    out = np.zeros(v.dim)
    out[i] += v.xdot[j]
    out[j] -= v.xdot[i]
    return out
