"""Metric fields on a single coordinate chart and the quantities built from them.

A :class:`MetricField` is a symmetric, nondegenerate ``g_ij(x)`` of any
signature.  Only its upper triangle is ever read, so symmetry holds exactly.
From it we get the inverse metric, Christoffel symbols, the Liouville
components ``p_j = g_ij xdot^i``, the kinetic energy ``T`` and
``theta_dot = 2T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _fd
from .errors import DegenerateMetric, LightlikeVelocity

LIGHTLIKE_TOL = 1e-12


def _symmetrize(a):
    upper = np.triu(a)
    return upper + np.triu(a, 1).T


@dataclass(frozen=True)
class MetricField:
    """Metric components ``g_ij(x)`` on an ``n``-dimensional chart.

    ``partials``, when given, returns ``dg`` with ``dg[k, i, j] = d g_ij / d x^k``.
    Otherwise central differences are used with step ``fd_step * max(1, |x^k|)``
    (``fd_step=None`` means the package default policy).
    """

    dim: int
    components: Callable[[np.ndarray], np.ndarray]
    partials: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: Optional[float] = None
    name: str = field(default="custom", compare=False)
    is_constant: bool = field(default=False, compare=False)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("metric dimension must be positive")

    def at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = np.asarray(self.components(x), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise ValueError(f"metric components have shape {g.shape}, expected {(self.dim, self.dim)}")
        return _symmetrize(g)

    def derivatives(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.partials is not None:
            dg = np.asarray(self.partials(x), dtype=float)
            return np.stack([_symmetrize(d) for d in dg])
        # jacobian puts the differentiation index last
        return np.moveaxis(_fd.jacobian(self.at, x, self.fd_step), -1, 0)

    @classmethod
    def constant(cls, matrix, name="constant"):
        g = _symmetrize(np.array(matrix, dtype=float))
        n = g.shape[0]
        zeros = np.zeros((n, n, n))
        return cls(n, lambda x: g, lambda x: zeros, name=name, is_constant=True)

    @classmethod
    def minkowski(cls, dim=4):
        return cls.constant(np.diag([1.0] + [-1.0] * (dim - 1)), name="minkowski")

    @classmethod
    def euclidean(cls, dim):
        return cls.constant(np.eye(dim), name="euclidean")


@dataclass(frozen=True)
class TangentPoint:
    """A point ``(x, xdot)`` of the tangent bundle."""

    x: np.ndarray
    xdot: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        xdot = np.asarray(self.xdot, dtype=float).reshape(-1)
        if x.shape != xdot.shape:
            raise ValueError("position and velocity must have the same length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xdot", xdot)

    @property
    def dim(self):
        return self.x.size


def det_tol(g) -> float:
    n = g.shape[0]
    return 1e-10 * float(np.max(np.linalg.norm(g, axis=1))) ** n


def _checked_inverse(g):
    if abs(np.linalg.det(g)) <= det_tol(g):
        raise DegenerateMetric(f"metric is degenerate (det={np.linalg.det(g):.3e})")
    return np.linalg.inv(g)


def metric_inverse(m: MetricField, x) -> np.ndarray:
    return _checked_inverse(m.at(x))


def christoffel(m: MetricField, x) -> np.ndarray:
    """Christoffel symbols of the second kind, ``gamma[j, k, l]``.

    gamma^j_kl = 1/2 g^jm (d_k g_ml + d_l g_mk - d_m g_kl)
    """
    ginv = metric_inverse(m, x)
    dg = m.derivatives(x)
    first_kind = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    return 0.5 * np.einsum("jm,mkl->jkl", ginv, first_kind)


def liouville_components(m: MetricField, v: TangentPoint) -> np.ndarray:
    return m.at(v.x) @ v.xdot


def theta_dot(m: MetricField, v: TangentPoint) -> float:
    return float(v.xdot @ m.at(v.x) @ v.xdot)


def kinetic_energy(m: MetricField, v: TangentPoint) -> float:
    # halving is exact in binary floating point, so theta_dot == 2 * T bit for bit
    return 0.5 * theta_dot(m, v)


def length_element_rate(m: MetricField, v: TangentPoint, lightlike_tol=LIGHTLIKE_TOL) -> float:
    """``sqrt(|g_ij xdot^i xdot^j|)``, i.e. d(tau)/dt."""
    q = theta_dot(m, v)
    if abs(q) <= lightlike_tol:
        raise LightlikeVelocity(f"|theta_dot| = {abs(q):.3e} is below {lightlike_tol:g}")
    return float(np.sqrt(abs(q)))


def lower_index(m: MetricField, vec, x) -> np.ndarray:
    return m.at(x) @ np.asarray(vec, dtype=float)
