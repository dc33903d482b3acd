import itertools
import sys
import math

import numpy as np
import pytest
import sympy as sp

from relmech.geometry import MetricField

ETA = 1.0
LAM = math.sqrt(2.0)
MU = 1.0 / math.sqrt(1.0 - 2.0 / math.pi ** 2)


class SymbolicMetric:
    """A metric given by sympy expressions with exactly differentiated partials.

    Serves as the oracle for the finite-difference paths in the package.
    """

    def __init__(self, matrix, symbols):
        self.symbols = symbols
        self.g = sp.Matrix(matrix)
        self.dim = len(symbols)
        self._g = sp.lambdify([symbols], self.g, "numpy")
        self._dg = sp.lambdify([symbols], [self.g.diff(s) for s in symbols], "numpy")

    def field(self, analytic=False):
        partials = (lambda x: np.array(self._dg(list(x)), dtype=float)) if analytic else None
        return MetricField(self.dim, lambda x: np.array(self._g(list(x)), dtype=float), partials)

    def christoffel(self, x):
        """Loop form of 1/2 g^jm (d_k g_ml + d_l g_mk - d_m g_kl) on exact derivatives."""
        n = self.dim
        ginv = np.linalg.inv(np.array(self._g(list(x)), dtype=float))
        dg = np.array(self._dg(list(x)), dtype=float)
        out = np.zeros((n, n, n))
        for j, k, l in itertools.product(range(n), repeat=3):
            out[j, k, l] = 0.5 * sum(ginv[j, m] * (dg[k, m, l] + dg[l, m, k] - dg[m, k, l]) for m in range(n))
        return out


def random_polynomial_metric(rng, dim=3, degree=3, scale=0.1):
    """Euclidean or Lorentzian diagonal plus a small random polynomial perturbation."""
    xs = sp.symbols(f"x0:{dim}")
    monomials = [sp.Integer(1)]
    for d in range(1, degree + 1):
        monomials += [sp.Mul(*c) for c in itertools.combinations_with_replacement(xs, d)]
    signs = np.ones(dim, dtype=int) if rng.random() < 0.5 else np.array([1] + [-1] * (dim - 1))
    M = sp.zeros(dim, dim)
    for i in range(dim):
        for j in range(i, dim):
            coeffs = rng.uniform(-scale, scale, size=len(monomials))
            entry = sum(sp.Float(c, 17) * m for c, m in zip(coeffs, monomials))
            if i == j:
                entry += int(signs[i])
            M[i, j] = entry
            M[j, i] = entry
    return SymbolicMetric(M, xs)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def polar():
    r, th = sp.symbols("r theta")
    return SymbolicMetric([[1, 0], [0, r ** 2]], (r, th))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
