"""Hull-White model: variance is a geometric Brownian motion dV = mu V dt + sigma V dW."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import heston
from ._numerics import dd_expm1_ratio, expm1_ratio, geometric_sum
from .errors import DegenerateParameter, OrderViolation, RootNotBracketed
from .params import HestonParams, HullWhiteParams, SwapSpec

DENOMINATOR_FLOOR = 1e-12
MU_BRACKET = (-50.0, 50.0)


def continuous_strike(p: HullWhiteParams, T: float) -> float:
    return p.v0 * expm1_ratio(p.mu, T) / T


def _check_denominators(p: HullWhiteParams):
    mu, s2 = p.mu, p.sigma**2
    if s2 == 0.0:
        return
    for name, value in (
        ("2mu+sigma^2", 2 * mu + s2),
        ("mu+sigma^2", mu + s2),
        ("4mu+sigma^2", 4 * mu + s2),
        ("4mu+3sigma^2", 4 * mu + 3 * s2),
    ):
        if abs(value) < DENOMINATOR_FLOOR:
            raise DegenerateParameter(f"{name} = {value:.3g} vanishes; limit not evaluated")


def discrete_strike(p: HullWhiteParams, spec: SwapSpec) -> float:
    """Six-term closed form regrouped into two divided differences.

    Each pair of terms sharing exp((2mu+sigma^2)T) - 1 or
    exp(3(4mu+sigma^2)T/8) - 1 collapses into a divided difference of
    x -> (exp(x delta) - 1) / x, which stays finite as mu -> 0.
    """
    _check_denominators(p)
    mu, sig, rho, v0 = p.mu, p.sigma, p.rho, p.v0
    T, n, r = spec.maturity, spec.periods, spec.rate
    delta = spec.delta
    kc = continuous_strike(p, T)
    c2 = 2 * mu + sig * sig
    c3 = 3 * (4 * mu + sig * sig) / 8
    second = v0 * v0 / (2 * T) * geometric_sum(c2, delta, n) * dd_expm1_ratio(c2, mu, delta)
    cross = rho * sig * v0**1.5 / T * geometric_sum(c3, delta, n) * dd_expm1_ratio(c3, mu, delta)
    return r * r * T / n + (1 - r * T / n) * kc + second - cross


def discrete_strike_raw(p: HullWhiteParams, spec: SwapSpec) -> float:
    """Literal transcription of the six-term formula (needs mu != 0)."""
    mu, s, rho, v0 = p.mu, p.sigma, p.rho, p.v0
    T, n, r = spec.maturity, spec.periods, spec.rate
    e = math.exp
    kc = v0 / (T * mu) * (e(mu * T) - 1)
    c2 = 2 * mu + s * s
    c3 = 3 * (4 * mu + s * s) / 8
    out = r * r * T / n + (1 - r * T / n) * kc
    out -= v0**2 * (e(c2 * T) - 1) * (e(mu * T / n) - 1) / (2 * T * mu * (mu + s * s) * (e(c2 * T / n) - 1))
    out += v0**2 * (e(c2 * T) - 1) / (2 * T * c2 * (mu + s * s))
    out += (
        8 * rho * (e(c3 * T) - 1) * v0**1.5 * s * (e(mu * T / n) - 1)
        / (mu * T * (4 * mu + 3 * s * s) * (e(c3 * T / n) - 1))
    )
    out -= 64 * rho * (e(c3 * T) - 1) * v0**1.5 * s / (3 * T * (4 * mu + s * s) * (4 * mu + 3 * s * s))
    return out


# moments -----------------------------------------------------------------

def power_moment(p: HullWhiteParams, a, s):
    """E[V_s^a] = V0^a exp(a mu s + (a^2 - a) sigma^2 s / 2)."""
    return p.v0**a * np.exp(a * p.mu * s + (a * a - a) * p.sigma**2 * s / 2)


def joint_moment(p: HullWhiteParams, a, s, b, u):
    """E[V_s^a V_u^b] for any ordering of s and u."""
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    swap = s > u
    t1 = np.where(swap, u, s)
    t2 = np.where(swap, s, u)
    e1 = np.where(swap, b, a)
    e2 = np.where(swap, a, b)
    tot = e1 + e2
    mu, s2 = p.mu, p.sigma**2
    return p.v0**tot * np.exp(
        tot * mu * t1 + (tot * tot - tot) * s2 * t1 / 2 + e2 * mu * (t2 - t1) + (e2 * e2 - e2) * s2 * (t2 - t1) / 2
    )


def terminal_variance(p: HullWhiteParams, T: float) -> float:
    return p.v0**2 * math.exp(2 * p.mu * T) * math.expm1(p.sigma**2 * T)


@dataclass(frozen=True)
class HwMoments:
    mean_s: float
    mean_sqrt_s: float
    second_s: float
    v_s_v_u: float
    sqrt_s_sqrt_u: float
    sqrt_s_v_u: float
    v_s_sqrt_u: float


def moments(p: HullWhiteParams, s: float, u: float) -> HwMoments:
    """Single-time moments at s and the four cross moments for s <= u."""
    if s > u:
        raise OrderViolation(f"need s <= u, got s={s}, u={u}")
    mu, s2, v0 = p.mu, p.sigma**2, p.v0
    e = math.exp
    return HwMoments(
        mean_s=v0 * e(mu * s),
        mean_sqrt_s=math.sqrt(v0) * e(mu * s / 2 - s2 * s / 8),
        second_s=v0**2 * e(2 * mu * s + s2 * s),
        v_s_v_u=v0**2 * e(mu * (u + s) + s2 * s),
        sqrt_s_sqrt_u=v0 * e(mu * (u + s) / 2 - s2 * (u - s) / 8),
        sqrt_s_v_u=v0**1.5 * e(mu * (s / 2 + u) + 3 * s2 * s / 8),
        v_s_sqrt_u=v0**1.5 * e(mu * (s + u / 2) - s2 * u / 8 + s2 * s / 2),
    )


def kernels(p: HullWhiteParams):
    """Generic-engine kernels with f(v) = 2 sqrt(v) / sigma, h(v) = (mu/sigma - sigma/4) sqrt(v)."""
    from .framework import ModelKernels

    if p.sigma == 0:
        raise DegenerateParameter("generic kernels need sigma > 0")
    sig, rho = p.sigma, p.rho
    q = p.mu / sig - sig / 4

    def jm(a, s, b, u):
        return joint_moment(p, a, s, b, u)

    def m1(s):
        return power_moment(p, 1.0, s)

    def m2(s, u):
        return jm(1.0, s, 1.0, u)

    def m3(s, u):
        return q * q * jm(0.5, s, 0.5, u)

    def m4(s, u):
        return q * jm(0.5, s, 1.0, u)

    def m5(t, s, delta):
        end = t + delta
        half = jm(0.5, end, 0.5, s) - jm(0.5, t, 0.5, s)
        one = jm(0.5, end, 1.0, s) - jm(0.5, t, 1.0, s)
        return 2 / sig * (2 * rho * q * half + one)

    def f_inc_sq(t, delta):
        end = t + delta
        return 4 / sig**2 * (power_moment(p, 1.0, end) + power_moment(p, 1.0, t) - 2 * jm(0.5, t, 0.5, end))

    return ModelKernels(m1=m1, m2=m2, m3=m3, m4=m4, m5=m5, f_increment_sq=f_inc_sq, rho=rho)


# Heston matching -----------------------------------------------------------

def match_params(h: HestonParams, T: float) -> HullWhiteParams:
    """Hull-White (mu, sigma) matching the Heston continuous strike and Var(V_T).

    mu solves V0 (exp(mu T) - 1) / (mu T) = K_c^H, which is strictly
    increasing in mu; sigma then follows in closed form.
    """
    if not h.v0 > 0:
        raise DegenerateParameter("matching needs v0 > 0")
    target = heston.continuous_strike(h, T)

    def excess(mu):
        return h.v0 * expm1_ratio(mu, T) / T - target

    lo, hi = MU_BRACKET
    if excess(lo) * excess(hi) > 0:
        raise RootNotBracketed(f"no mu in [{lo}, {hi}] matches K_c = {target:.6g}")
    if excess(0.0) == 0.0:
        mu = 0.0
    else:
        mu = brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    var_h = heston.terminal_variance(h, T)
    sigma = math.sqrt(math.log1p(var_h / (h.v0**2 * math.exp(2 * mu * T))) / T)
    return HullWhiteParams(mu=mu, sigma=sigma, rho=h.rho, v0=h.v0)
