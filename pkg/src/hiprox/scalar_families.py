"""Scalar function families for separable objectives f(x) = sum_i f_i(<a_i, x> - b_i).

Each family evaluates value and k-th derivatives at scalar arguments and
reports sup |f^(k)| over an interval (used for box-restricted smoothness
constants). The neg-log family exposes the identity

    f^(2k)(t) = (2k-1)! * (f''(t))^k,

so all even-order derivatives can be produced from second-derivative
evaluations alone; callers that only need even orders never request an order
above 2 from it.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, ParameterError


class ScalarFamily:
    """Base scalar family. Subclasses define value/derivative/derivative_sup."""

    name = "base"
    #: even derivatives computable from f'' alone (order-2 evaluations only)
    even_from_second = False
    #: left end of the open domain, or None for all of R
    domain_low = None

    def check_domain(self, t):
        if self.domain_low is not None and t <= self.domain_low:
            raise DomainError("argument %r outside domain (> %r)" % (t, self.domain_low))

    def value(self, t):
        raise NotImplementedError

    def derivative(self, t, k):
        raise NotImplementedError

    def derivative_sup(self, k, t_lo, t_hi):
        """sup over [t_lo, t_hi] of |f^(k)|; may return inf."""
        raise NotImplementedError


class Linear(ScalarFamily):
    """f(t) = t."""

    name = "linear"

    def value(self, t):
        return float(t)

    def derivative(self, t, k):
        return 1.0 if k == 1 else 0.0

    def derivative_sup(self, k, t_lo, t_hi):
        return 1.0 if k == 1 else 0.0


class Quartic(ScalarFamily):
    """f(t) = t^4."""

    name = "quartic"

    def value(self, t):
        return float(t) ** 4

    def derivative(self, t, k):
        t = float(t)
        if k == 1:
            return 4.0 * t ** 3
        if k == 2:
            return 12.0 * t ** 2
        if k == 3:
            return 24.0 * t
        if k == 4:
            return 24.0
        return 0.0

    def derivative_sup(self, k, t_lo, t_hi):
        m = max(abs(t_lo), abs(t_hi))
        return abs(self.derivative(m, k)) if k != 4 else 24.0


class NegLog(ScalarFamily):
    """f(t) = -log t on t > 0; f^(k)(t) = (-1)^k (k-1)! / t^k."""

    name = "neg-log"
    even_from_second = True
    domain_low = 0.0

    def value(self, t):
        self.check_domain(t)
        return -math.log(t)

    def derivative(self, t, k):
        self.check_domain(t)
        if k % 2 == 0 and k > 2:
            # route even orders through f'' (exact identity)
            d2 = 1.0 / (float(t) * float(t))
            return math.factorial(k - 1) * d2 ** (k // 2)
        return (-1.0) ** k * math.factorial(k - 1) / float(t) ** k

    def derivative_sup(self, k, t_lo, t_hi):
        if t_lo <= 0:
            return np.inf
        return math.factorial(k - 1) / t_lo ** k


class Logistic(ScalarFamily):
    """f(t) = log(1 + e^t); derivatives are polynomials in s = sigmoid(t)."""

    name = "logistic"

    def __init__(self):
        # poly[k] holds ascending coefficients of f^(k) in powers of s,
        # built from f' = s and ds/dt = s - s^2.
        self._poly = {1: np.array([0.0, 1.0])}

    def _coeffs(self, k):
        if k < 1:
            raise ParameterError("derivative order must be >= 1")
        while k not in self._poly:
            j = max(self._poly)
            c = self._poly[j]
            dc = c[1:] * np.arange(1, len(c))  # d/ds
            # multiply by (s - s^2)
            nxt = np.zeros(len(dc) + 2)
            nxt[1 : 1 + len(dc)] += dc
            nxt[2 : 2 + len(dc)] -= dc
            self._poly[j + 1] = nxt
        return self._poly[k]

    @staticmethod
    def _sigmoid(t):
        t = float(t)
        if t >= 0:
            return 1.0 / (1.0 + math.exp(-t))
        e = math.exp(t)
        return e / (1.0 + e)

    def value(self, t):
        t = float(t)
        return max(t, 0.0) + math.log1p(math.exp(-abs(t)))

    def derivative(self, t, k):
        s = self._sigmoid(t)
        c = self._coeffs(k)
        return float(np.polyval(c[::-1], s))

    def derivative_sup(self, k, t_lo, t_hi):
        # |f^(k)| depends on t only through s in (0,1); a dense s-grid gives
        # the global sup to plotting accuracy, padded by 5%.
        c = self._coeffs(k)
        s = np.linspace(1e-9, 1.0 - 1e-9, 20001)
        return 1.05 * float(np.abs(np.polyval(c[::-1], s)).max())


class Power(ScalarFamily):
    """f(t) = t^m for an even integer m >= 2 (smooth power growth)."""

    name = "power"

    def __init__(self, exponent):
        m = int(exponent)
        if m != exponent or m < 2 or m % 2 != 0:
            raise ParameterError("power exponent must be an even integer >= 2")
        self.exponent = m

    def value(self, t):
        return float(t) ** self.exponent

    def derivative(self, t, k):
        m = self.exponent
        if k > m:
            return 0.0
        return math.factorial(m) / math.factorial(m - k) * float(t) ** (m - k)

    def derivative_sup(self, k, t_lo, t_hi):
        m = max(abs(t_lo), abs(t_hi))
        if k > self.exponent:
            return 0.0
        return math.factorial(self.exponent) / math.factorial(self.exponent - k) * m ** (
            self.exponent - k
        )


_FAMILIES = {
    "linear": Linear,
    "quartic": Quartic,
    "neg-log": NegLog,
    "logistic": Logistic,
}


def make_family(name, **kwargs):
    if name == "power":
        return Power(**kwargs)
    try:
        return _FAMILIES[name]()
    except KeyError:
        raise ParameterError("unknown scalar family %r" % (name,)) from None
