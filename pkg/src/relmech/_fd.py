"""Central finite differences with the package-wide step policy."""

import os

import numpy as np

_CBRT_EPS = np.finfo(float).eps ** (1.0 / 3.0)


def fd_steps(x, base=None):
    """Per-coordinate step ``base * max(1, |x_k|)``.

    ``base`` defaults to cbrt(machine epsilon); the ``RELMECH_FD_STEP``
    environment variable overrides the default.
    """
    if base is None:
        env = os.environ.get("RELMECH_FD_STEP")
        base = float(env) if env else _CBRT_EPS
    x = np.asarray(x, dtype=float)
    return base * np.maximum(1.0, np.abs(x))


def jacobian(f, x, base=None):
    """d f_i / d x_k as an array of shape ``f(x).shape + (len(x),)``."""
    x = np.asarray(x, dtype=float)
    h = fd_steps(x, base)
    cols = []
    for k in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[k] += h[k]
        xm[k] -= h[k]
        # the realised step, not h[k], is what separates xp and xm
        cols.append((np.asarray(f(xp), dtype=float) - np.asarray(f(xm), dtype=float)) / (xp[k] - xm[k]))
    return np.stack(cols, axis=-1)


def gradient(f, x, base=None):
    return jacobian(lambda y: np.asarray(f(y), dtype=float).reshape(()), x, base)
