"""Exponential polynomials sum_k c_k exp(kappa (i_k p + j_k q)) with exact interval integrals.

Ornstein-Uhlenbeck moments of any order are finite sums of this form in the
earlier time p and the later time q, so their integrals over a sampling
interval (and over the ordered triangle p <= q inside it) follow from a
small table of elementary integrals.
"""

from __future__ import annotations

import math
from collections import defaultdict
from math import comb

from ._numerics import expm1_ratio


class ExpPoly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for key, c in (terms or {}).items():
            if c != 0.0:
                self.terms[key] = float(c)

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def exp(cls, i, j=0, c=1.0):
        return cls({(i, j): c})

    def __add__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly.const(other)
        out = defaultdict(float, self.terms)
        for key, c in other.terms.items():
            out[key] += c
        return ExpPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExpPoly):
            return ExpPoly({k: c * other for k, c in self.terms.items()})
        out = defaultdict(float)
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                out[(i1 + i2, j1 + j2)] += c1 * c2
        return ExpPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = ExpPoly.const(1.0)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, kappa, p, q=0.0):
        return sum(c * math.exp(kappa * (i * p + j * q)) for (i, j), c in self.terms.items())

    def __repr__(self):
        return f"ExpPoly({self.terms})"


def double_factorial_odd(k):
    """(k-1)!! for even k >= 0: the k-th moment of a standard normal."""
    out = 1
    for m in range(k - 1, 0, -2):
        out *= m
    return out


class OUAlgebra:
    """Moments of dV = kappa (theta - V) dt + gamma dW as exponential polynomials."""

    def __init__(self, kappa, theta, gamma, v0):
        self.kappa = kappa
        half_var = gamma * gamma / (2 * kappa)
        self.mean = ExpPoly.const(theta) + ExpPoly.exp(-1, 0, v0 - theta)
        self.var = ExpPoly.const(half_var) + ExpPoly.exp(-2, 0, -half_var)
        decay = ExpPoly.exp(1, -1)  # exp(-kappa (q - p))
        self.decay = decay
        self.shift = theta * (1 - decay)
        self.step_var = ExpPoly.const(half_var) + ExpPoly.exp(2, -2, -half_var)
        self._single = {}
        self._joint = {}

    def single(self, m):
        """E[V_p^m]."""
        if m not in self._single:
            out = ExpPoly()
            for k in range(0, m + 1, 2):
                out = out + comb(m, k) * double_factorial_odd(k) * (self.mean ** (m - k)) * (self.var ** (k // 2))
            self._single[m] = out
        return self._single[m]

    def joint(self, a, b):
        """E[V_p^a V_q^b] for p <= q, via V_q = decay V_p + shift + Gaussian."""
        key = (a, b)
        if key not in self._joint:
            out = ExpPoly()
            for k in range(0, b + 1, 2):
                noise = comb(b, k) * double_factorial_odd(k) * (self.step_var ** (k // 2))
                rest = b - k
                for l in range(rest + 1):
                    coeff = comb(rest, l) * (self.decay**l) * (self.shift ** (rest - l))
                    out = out + noise * coeff * self.single(a + l)
            self._joint[key] = out
        return self._joint[key]

    def expect(self, phi, psi=None):
        """E[phi(V_p) psi(V_q)] for polynomials given as {power: coefficient}."""
        out = ExpPoly()
        if psi is None:
            for a, ca in phi.items():
                out = out + ca * self.single(a)
            return out
        for a, ca in phi.items():
            for b, cb in psi.items():
                out = out + (ca * cb) * self.joint(a, b)
        return out


# elementary integrals over [0, delta] ------------------------------------------

_SERIES_DEGREE = 60


def triangle_integral(a, b, delta):
    """int_0^delta int_0^y exp(a x + b y) dx dy."""
    if max(abs(a), abs(b)) * delta <= 2.0:
        total = 0.0
        fact_p = 1.0
        for p in range(_SERIES_DEGREE):
            if p:
                fact_p *= p
            term_p = (a * delta) ** p / fact_p / (p + 1)
            if term_p == 0.0 and p > 0:
                break
            fact_q = 1.0
            inner = 0.0
            for q in range(_SERIES_DEGREE - p):
                if q:
                    fact_q *= q
                t = (b * delta) ** q / fact_q / (p + q + 2)
                inner += t
                if q > 2 and abs(t) < 1e-18 * abs(inner):
                    break
            total += term_p * inner
            if p > 2 and abs(term_p) < 1e-18:
                break
        return total * delta * delta
    if a != 0.0:
        return (expm1_ratio(a + b, delta) - expm1_ratio(b, delta)) / a
    if b == 0.0:
        return delta * delta / 2
    return (delta * math.exp(b * delta) - expm1_ratio(b, delta)) / b
