"""Schobel-Zhu model: the volatility V is an Ornstein-Uhlenbeck process.

dV = kappa (theta - V) dt + gamma dW and the instantaneous variance is V^2.
All parameters are in volatility units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._exppoly import OUAlgebra, triangle_integral
from ._numerics import expm1_ratio, geometric_sum
from .errors import DegenerateParameter, OrderViolation
from .params import SchobelZhuParams, SwapSpec

KAPPA_T_FLOOR = 1e-8
KAPPA_DELTA_FLOOR = 1e-12


def continuous_strike(p: SchobelZhuParams, T: float) -> float:
    k, th, g, v0 = p.kappa, p.theta, p.gamma, p.v0
    if k * T < KAPPA_T_FLOOR:
        raise DegenerateParameter(f"kappa*T = {k * T:.3g} below floor {KAPPA_T_FLOOR}")
    half_var = g * g / (2 * k)
    return (
        half_var
        + th * th
        + ((v0 - th) ** 2 - half_var) * expm1_ratio(-2 * k, T) / T
        + 2 * th * (v0 - th) * expm1_ratio(-k, T) / T
    )


# moments -------------------------------------------------------------------

def _mean(p, s):
    return (p.v0 - p.theta) * np.exp(-p.kappa * s) + p.theta


def _var(p, s):
    return p.gamma**2 / (2 * p.kappa) * -np.expm1(-2 * p.kappa * s)


def _single(p, s):
    """(E V_s, E V_s^2, E V_s^3, E V_s^4)."""
    e, v = _mean(p, s), _var(p, s)
    return e, e * e + v, e**3 + 3 * e * v, e**4 + 6 * e * e * v + 3 * v * v


def _ordered(p, s, u):
    """Cross moments for s <= u: (E V_sV_u, E V_s^2V_u^2, E V_sV_u^2, E V_s^2V_u)."""
    m1, m2, m3, m4 = _single(p, s)
    a = np.exp(-p.kappa * (u - s))
    one_m_a = -np.expm1(-p.kappa * (u - s))
    spread = p.theta**2 * one_m_a**2 + p.gamma**2 / (2 * p.kappa) * -np.expm1(-2 * p.kappa * (u - s))
    return (
        a * m2 + p.theta * one_m_a * m1,
        a * a * m4 + 2 * p.theta * a * one_m_a * m3 + spread * m2,
        a * a * m3 + 2 * p.theta * a * one_m_a * m2 + spread * m1,
        a * m3 + p.theta * one_m_a * m2,
    )


@dataclass(frozen=True)
class OuMoments:
    mean_s: float
    second_s: float
    third_s: float
    fourth_s: float
    v_s_v_u: float
    v2_s_v2_u: float
    v_s_v2_u: float
    v2_s_v_u: float

    @property
    def e_s(self) -> float:
        return self.mean_s

    @property
    def v_s(self) -> float:
        return self.second_s - self.mean_s**2


def ou_moments(p: SchobelZhuParams, s: float, u: float) -> OuMoments:
    """Single moments at s and the four cross moments for 0 <= s <= u."""
    if s > u:
        raise OrderViolation(f"need s <= u, got s={s}, u={u}")
    single = [float(x) for x in _single(p, s)]
    cross = [float(x) for x in _ordered(p, s, u)]
    return OuMoments(*single, *cross)


def joint_moment(p: SchobelZhuParams, a: int, s, b: int, u):
    """E[V_s^a V_u^b] for a, b in {0, 1, 2} and either time ordering."""
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    lo, hi = np.minimum(s, u), np.maximum(s, u)

    def pick(e_lo, e_hi):
        if e_lo == 0 and e_hi == 0:
            return np.ones(np.broadcast(lo, hi).shape)
        if e_hi == 0:
            return _single(p, lo)[e_lo - 1] + 0 * hi
        if e_lo == 0:
            return _single(p, hi)[e_hi - 1] + 0 * lo
        vv, v2v2, vv2, v2v = _ordered(p, lo, hi)
        return {(1, 1): vv, (2, 2): v2v2, (1, 2): vv2, (2, 1): v2v}[(e_lo, e_hi)]

    return np.where(s <= u, pick(a, b), pick(b, a))


def kernels(p: SchobelZhuParams):
    """Generic-engine kernels with f(v) = v^2 / (2 gamma), h(v) = kappa theta v / gamma - kappa v^2 / gamma + gamma / 2."""
    from .framework import ModelKernels

    if p.gamma == 0:
        raise DegenerateParameter("generic kernels need gamma > 0")
    k, th, g, rho = p.kappa, p.theta, p.gamma, p.rho

    def jm(a, s, b, u):
        return joint_moment(p, a, s, b, u)

    def second(s):
        return _single(p, np.asarray(s, dtype=float))[1]

    def m1(s):
        return second(s)

    def m2(s, u):
        return jm(2, s, 2, u)

    def m3(s, u):
        return (
            (k * th / g) ** 2 * jm(1, s, 1, u)
            - k * k * th / g**2 * (jm(1, s, 2, u) + jm(2, s, 1, u))
            + k * th / 2 * (_mean(p, s) + _mean(p, u))
            - k / 2 * (second(s) + second(u))
            + (k / g) ** 2 * jm(2, s, 2, u)
            + g * g / 4
        )

    def m4(s, u):
        return k * th / g * jm(1, s, 2, u) - k / g * jm(2, s, 2, u) + g / 2 * second(u)

    def m5(t, s, delta):
        end = t + delta
        return (
            rho * k * th / g**2 * (jm(2, end, 1, s) - jm(2, t, 1, s))
            + (g - 2 * rho * k) / (2 * g * g) * (jm(2, end, 2, s) - jm(2, t, 2, s))
            + rho / 2 * (second(end) - second(t))
        )

    def f_inc_sq(t, delta):
        t = np.asarray(t, dtype=float)
        end = t + delta
        return (_single(p, end)[3] + _single(p, t)[3] - 2 * jm(2, t, 2, end)) / (4 * g * g)

    return ModelKernels(m1=m1, m2=m2, m3=m3, m4=m4, m5=m5, f_increment_sq=f_inc_sq, rho=rho)


# analytic discrete strike ---------------------------------------------------

def _deterministic_strike(p: SchobelZhuParams, spec: SwapSpec) -> float:
    """gamma = 0: the log-return over each interval is Gaussian with variance I = int e_s^2."""
    k, th, v0 = p.kappa, p.theta, p.v0
    T, n, r = spec.maturity, spec.periods, spec.rate
    delta = spec.delta
    starts = delta * np.arange(n)
    d = v0 - th
    integral = (
        th * th * delta
        + 2 * th * d * np.exp(-k * starts) * expm1_ratio(-k, delta)
        + d * d * np.exp(-2 * k * starts) * expm1_ratio(-2 * k, delta)
    )
    per = (r * delta - integral / 2) ** 2 + integral
    return math.fsum(per) / T


def discrete_strike(p: SchobelZhuParams, spec: SwapSpec) -> float:
    """Discrete fair strike with every interval integral done in closed form.

    Each kernel is a finite sum of c exp(kappa (i p + j q)) in the earlier
    time p and the later time q. Shifting to the interval start t factors
    out exp(kappa (i + j) t), the remaining integral over the interval (or
    the ordered triangle in it) is elementary, and the sum over intervals is
    a geometric series.
    """
    T, n, r = spec.maturity, spec.periods, spec.rate
    delta = spec.delta
    k = p.kappa
    if k * delta < KAPPA_DELTA_FLOOR:
        raise DegenerateParameter(f"kappa*delta = {k * delta:.3g} below floor {KAPPA_DELTA_FLOOR}")
    if p.gamma == 0:
        return _deterministic_strike(p, spec)
    th, g, rho = p.theta, p.gamma, p.rho
    alg = OUAlgebra(k, th, g, p.v0)

    h = {0: g / 2, 1: k * th / g, 2: -k / g}
    sq = {2: 1.0}
    f = {2: 1 / (2 * g)}
    gfun = {0: rho * g, 1: 2 * rho * k * th / g, 2: 1 - 2 * rho * k / g}

    def over_grid(i, j):
        return geometric_sum(k * (i + j), delta, n)

    def line(poly):
        # sum_t int_t^{t+delta} poly(p) dp
        return math.fsum(c * expm1_ratio(k * i, delta) * over_grid(i, 0) for (i, _), c in poly.terms.items())

    def triangle(poly):
        # sum_t of the integral over t <= p <= q <= t + delta
        return math.fsum(
            c * triangle_integral(k * i, k * j, delta) * over_grid(i, j) for (i, j), c in poly.terms.items()
        )

    def at_end(poly):
        # sum_t poly(p = t, q = t + delta)
        return math.fsum(c * math.exp(k * j * delta) * over_grid(i, j) for (i, j), c in poly.terms.items())

    i1 = line(alg.single(2))
    i2 = 2 * triangle(alg.joint(2, 2))
    i3 = 2 * triangle(alg.expect(h, h))
    i4 = triangle(alg.expect(h, sq)) + triangle(alg.expect(sq, h))

    # m5: E[g(V_s) f(V_{t+delta})] with s earlier, minus E[f(V_t) g(V_s)] with t earlier
    first = alg.expect(gfun, f)
    second = alg.expect(f, gfun)
    i5 = math.fsum(
        c * math.exp(k * j * delta) * expm1_ratio(k * i, delta) * over_grid(i, j) for (i, j), c in first.terms.items()
    ) - math.fsum(c * expm1_ratio(k * j, delta) * over_grid(i, j) for (i, j), c in second.terms.items())

    fourth = alg.single(4)
    f_inc = (
        math.fsum(c * math.exp(k * i * delta) * over_grid(i, 0) for (i, _), c in fourth.terms.items())
        + math.fsum(c * over_grid(i, 0) for (i, _), c in fourth.terms.items())
        - 2 * at_end(alg.joint(2, 2))
    ) / (4 * g * g)

    total = (
        n * (r * delta) ** 2
        + (1 - rho * rho - r * delta) * i1
        - rho * i5
        + 0.25 * i2
        + rho * rho * f_inc
        + rho * rho * i3
        + rho * i4
    )
    return total / T
