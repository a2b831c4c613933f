"""Euclidean geometry ``<Bx, x>^(1/2)`` and the power regularizer ``|x|^(p+1)/(p+1)``.

``MetricSpace`` wraps an SPD operator B (identity, diagonal, or dense) and
provides the primal norm, the dual norm ``<g, B^{-1} g>^(1/2)``, and B
applications. ``PowerProx`` provides the regularizer

    d(h) = |h|^{p+1} / (p+1),

its gradient ``|h|^{p-1} B h`` and Hessian quadratic form

    <D^2 d(h) u, u> = |h|^{p-1} <Bu, u> + (p-1) |h|^{p-3} <Bh, u>^2,

which is bounded below by ``|h|^{p-1} <Bu, u>``.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ParameterError

_SYM_TOL = 1e-12


class MetricSpace:
    """Norm pair induced by an SPD operator B.

    Parameters
    ----------
    dimension : int
    weights : array_like, optional
        Positive diagonal of B. Mutually exclusive with ``matrix``.
    matrix : array_like, optional
        Dense SPD B. Symmetry is enforced up to a relative 1e-12 and the
        Cholesky factor is cached for dual-norm solves.
    """

    def __init__(self, dimension, weights=None, matrix=None):
        if dimension < 1:
            raise ParameterError("dimension must be >= 1")
        if weights is not None and matrix is not None:
            raise ParameterError("pass at most one of weights, matrix")
        self.dimension = int(dimension)
        self._weights = None
        self._matrix = None
        self._chol = None
        if weights is not None:
            w = np.asarray(weights, dtype=float)
            if w.shape != (self.dimension,):
                raise DimensionError("weights shape %s != (%d,)" % (w.shape, dimension))
            if not np.all(w > 0):
                raise ParameterError("diagonal of B must be positive")
            self._weights = w
        elif matrix is not None:
            a = np.asarray(matrix, dtype=float)
            if a.shape != (self.dimension, self.dimension):
                raise DimensionError("matrix shape %s" % (a.shape,))
            scale = max(1.0, float(np.abs(a).max()))
            if np.abs(a - a.T).max() > _SYM_TOL * scale:
                raise ParameterError("B must be symmetric")
            a = 0.5 * (a + a.T)
            try:
                self._chol = np.linalg.cholesky(a)
            except np.linalg.LinAlgError as exc:
                raise ParameterError("B must be positive definite") from exc
            self._matrix = a

    @classmethod
    def euclidean(cls, dimension):
        return cls(dimension)

    @property
    def is_identity(self):
        return self._weights is None and self._matrix is None

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise DimensionError("vector shape %s != (%d,)" % (x.shape, self.dimension))
        return x

    def apply(self, x):
        """B x."""
        x = self._check(x)
        if self._weights is not None:
            return self._weights * x
        if self._matrix is not None:
            return self._matrix @ x
        return x.copy()

    def apply_inv(self, g):
        """B^{-1} g."""
        g = self._check(g)
        if self._weights is not None:
            return g / self._weights
        if self._matrix is not None:
            y = np.linalg.solve(self._chol, g)
            return np.linalg.solve(self._chol.T, y)
        return g.copy()

    def matrix(self):
        """Dense B (assembled on demand for the diagonal/identity cases)."""
        if self._matrix is not None:
            return self._matrix.copy()
        if self._weights is not None:
            return np.diag(self._weights)
        return np.eye(self.dimension)

    def primal_norm(self, x):
        x = self._check(x)
        return float(np.sqrt(max(0.0, float(np.dot(self.apply(x), x)))))

    def dual_norm(self, g):
        g = self._check(g)
        return float(np.sqrt(max(0.0, float(np.dot(g, self.apply_inv(g))))))


class PowerProx:
    """Power regularizer d(h) = |h|^{p+1}/(p+1) in a given metric, p >= 1."""

    def __init__(self, p, metric):
        if int(p) != p or p < 1:
            raise ParameterError("p must be an integer >= 1")
        self.p = int(p)
        self.metric = metric

    def value(self, h):
        r = self.metric.primal_norm(h)
        return r ** (self.p + 1) / (self.p + 1)

    def gradient(self, h):
        r = self.metric.primal_norm(h)
        if r == 0.0 and self.p > 1:
            return np.zeros(self.metric.dimension)
        return r ** (self.p - 1) * self.metric.apply(h)

    def hessian_form(self, h, u):
        """<D^2 d(h) u, u>. Continuous limit 0 at h = 0 for p >= 2."""
        r = self.metric.primal_norm(h)
        bu_u = float(np.dot(self.metric.apply(u), u))
        if self.p == 1:
            return bu_u
        if r == 0.0:
            return 0.0
        bh_u = float(np.dot(self.metric.apply(h), u))
        return r ** (self.p - 1) * bu_u + (self.p - 1) * r ** (self.p - 3) * bh_u ** 2

    def hessian_matrix(self, h):
        """Dense D^2 d(h) = |h|^{p-1} B + (p-1)|h|^{p-3} (Bh)(Bh)^T."""
        r = self.metric.primal_norm(h)
        n = self.metric.dimension
        if self.p == 1:
            return self.metric.matrix()
        if r == 0.0:
            return np.zeros((n, n))
        bh = self.metric.apply(h)
        return r ** (self.p - 1) * self.metric.matrix() + (
            self.p - 1
        ) * r ** (self.p - 3) * np.outer(bh, bh)

    def hessian_apply(self, h, u):
        """D^2 d(h) u as a vector."""
        r = self.metric.primal_norm(h)
        if self.p == 1:
            return self.metric.apply(u)
        if r == 0.0:
            return np.zeros(self.metric.dimension)
        bh = self.metric.apply(h)
        return r ** (self.p - 1) * self.metric.apply(u) + (
            self.p - 1
        ) * r ** (self.p - 3) * float(np.dot(bh, u)) * bh

    def uniform_convexity_modulus(self):
        """Modulus c with d(y) >= d(x) + <grad d(x), y-x> + c |y-x|^{p+1}."""
        return (1.0 / (self.p + 1)) * 0.5 ** (self.p - 1)
