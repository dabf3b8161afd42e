"""Heston model: continuous, discrete and simple-return fair strikes.

Variance follows dV = kappa (theta - V) dt + gamma sqrt(V) dW.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._numerics import exp_remainder, one_minus_x_over_expm1
from .errors import DegenerateParameter, NonRealMgf, OrderViolation, ValidityDomain
from .params import HestonParams, SwapSpec

KAPPA_T_FLOOR = 1e-8
IMAG_TOLERANCE = 1e-10


def _check_kappa(p: HestonParams, T: float):
    if p.kappa * T < KAPPA_T_FLOOR:
        raise DegenerateParameter(f"kappa*T = {p.kappa * T:.3g} below floor {KAPPA_T_FLOOR}")


def continuous_strike(p: HestonParams, T: float) -> float:
    _check_kappa(p, T)
    x = p.kappa * T
    return p.theta + (p.v0 - p.theta) * (-math.expm1(-x)) / x


def discretization_gap(p: HestonParams, spec: SwapSpec) -> float:
    """K_d(n) - K_c, evaluated without the O(n) cancellations of the raw formula.

    The raw closed form carries pairs of terms whose O(n) parts cancel against
    the continuous strike; here those pairs are recombined exactly into
    exp(-x) - 1 + x and 1 - x/(exp(x) - 1) with x = kappa T / n.
    """
    k, th, g, rho, v0 = p.kappa, p.theta, p.gamma, p.rho, p.v0
    T, n, r = spec.maturity, spec.periods, spec.rate
    _check_kappa(p, T)
    x = k * T / n
    if x < KAPPA_T_FLOOR / n:
        raise DegenerateParameter("kappa*T/n underflows the stable-evaluation floor")
    one_m_e1 = -math.expm1(-k * T)
    e2_m1 = math.expm1(-2 * k * T)
    tanh_half = math.tanh(x / 2)

    total = n * (g * g * (th - 2 * v0) + 2 * k * (v0 - th) ** 2) * e2_m1 * (-tanh_half)
    total += 2 * k**3 * T * T * (th - 2 * r) ** 2
    total += 4 * (v0 - th) * k * k * T * (th - 2 * r) * one_m_e1
    total += 2 * n * n * th * g * (g - 4 * rho * k) * exp_remainder(x)
    total += 4 * n * (v0 - th) * g * (g - 2 * rho * k) * one_m_e1 * one_minus_x_over_expm1(x)
    return total / (8 * n * k**3 * T)


def discrete_strike(p: HestonParams, spec: SwapSpec) -> float:
    return continuous_strike(p, spec.maturity) + discretization_gap(p, spec)


def discrete_strike_raw(p: HestonParams, spec: SwapSpec) -> float:
    """Five-term closed form transcribed term by term (reference only)."""
    k, th, g, rho, v0 = p.kappa, p.theta, p.gamma, p.rho, p.v0
    T, n, r = spec.maturity, spec.periods, spec.rate
    ekn = math.exp(k * T / n)
    total = n * (g * g * (th - 2 * v0) + 2 * k * (v0 - th) ** 2) * (math.exp(-2 * k * T) - 1) * (
        (1 - ekn) / (1 + ekn)
    )
    total += 2 * k * T * (k * k * T * (th - 2 * r) ** 2 + n * th * (4 * k * k - 4 * rho * k * g + g * g))
    total += 4 * (v0 - th) * (n * (2 * k * k + g * g - 2 * rho * k * g) + k * k * T * (th - 2 * r)) * (
        1 - math.exp(-k * T)
    )
    total -= 2 * n * n * th * g * (g - 4 * rho * k) * (1 - math.exp(-k * T / n))
    total += 4 * (v0 - th) * k * T * g * (g - 2 * rho * k) * (1 - math.exp(-k * T)) / (1 - ekn)
    return total / (8 * n * k**3 * T)


@dataclass(frozen=True)
class HestonAux:
    """Drift-adjustment constants a = r - rho kappa theta / gamma, b = rho kappa / gamma - 1/2."""

    a: float
    b: float

    @classmethod
    def of(cls, p: HestonParams, r: float) -> "HestonAux":
        if p.gamma == 0:
            raise DegenerateParameter("HestonAux needs gamma > 0")
        return cls(r - p.rho * p.kappa * p.theta / p.gamma, p.rho * p.kappa / p.gamma - 0.5)


# variance moments --------------------------------------------------------

def mean_variance(p: HestonParams, t):
    return p.theta + np.exp(-p.kappa * t) * (p.v0 - p.theta)


def cross_moment(p: HestonParams, t, s):
    """E[V_t V_s] for s <= t (array friendly, order not checked)."""
    k, th, g, v0 = p.kappa, p.theta, p.gamma, p.v0
    return (
        th * th
        + np.exp(-k * t) * (v0 - th) * (th + g * g / k)
        + np.exp(-k * s) * th * (v0 - th)
        + np.exp(-k * (t + s)) * ((th - v0) ** 2 + g * g / (2 * k) * (th - 2 * v0))
        + g * g / (2 * k) * th * np.exp(-k * (t - s))
    )


def terminal_variance(p: HestonParams, T: float) -> float:
    """Var(V_T)."""
    k, th, g, v0 = p.kappa, p.theta, p.gamma, p.v0
    return g * g / (2 * k) * (th + 2 * math.exp(-k * T) * (v0 - th) + math.exp(-2 * k * T) * (th - 2 * v0))


def variance_moments(p: HestonParams, t: float, s: float):
    """(E[V_t], E[V_t V_s], Var(V_t)) for 0 <= s <= t."""
    if s > t:
        raise OrderViolation(f"need s <= t, got s={s}, t={t}")
    return float(mean_variance(p, t)), float(cross_moment(p, t, s)), terminal_variance(p, t)


def kernels(p: HestonParams):
    """Moment kernels of the generic engine with f(v) = v / gamma, h(v) = kappa (theta - v) / gamma."""
    from .framework import ModelKernels

    if p.gamma == 0:
        raise DegenerateParameter("generic kernels need gamma > 0")
    k, th, g, rho = p.kappa, p.theta, p.gamma, p.rho

    def ev(s):
        return mean_variance(p, s)

    def evv(s, u):
        lo, hi = np.minimum(s, u), np.maximum(s, u)
        return cross_moment(p, hi, lo)

    def m2(s, u):
        return evv(s, u)

    def m3(s, u):
        return (k / g) ** 2 * (th * th - th * ev(s) - th * ev(u) + evv(s, u))

    def m4(s, u):
        return k / g * (th * ev(u) - evv(s, u))

    def m5(t, s, delta):
        dv = lambda w: evv(t + delta, w) - evv(t, w)  # noqa: E731
        de = ev(t + delta) - ev(t)
        return (2 * rho * k / g * (th * de - dv(s)) + dv(s)) / g

    def f_inc_sq(t, delta):
        return (evv(t + delta, t + delta) + evv(t, t) - 2 * evv(t, t + delta)) / g**2

    return ModelKernels(m1=ev, m2=m2, m3=m3, m4=m4, m5=m5, f_increment_sq=f_inc_sq, rho=rho)


# Zhu-Lian simple-return swap ------------------------------------------------

@dataclass(frozen=True)
class MgfAux:
    """Auxiliary functions of the log-price moment generating function at fixed u and step."""

    d: complex
    g: complex
    q: complex
    drift: complex  # kappa theta / gamma^2 * ((kappa - gamma rho u - d) t - 2 ln(...))

    @classmethod
    def of(cls, p: HestonParams, u: float, step: float) -> "MgfAux":
        k, th, gam, rho = p.kappa, p.theta, p.gamma, p.rho
        beta = k - gam * rho * u
        d2 = beta * beta + gam * gam * (u - u * u)
        d = cmath.sqrt(d2) if d2 < 0 else complex(math.sqrt(d2))
        # beta - d rewritten as -gamma^2 (u - u^2) / (beta + d) to survive gamma -> 0
        beta_minus_d_over_g2 = -(u - u * u) / (beta + d)
        g = beta_minus_d_over_g2 * gam * gam / (beta + d)
        e = cmath.exp(-d * step)
        q = beta_minus_d_over_g2 * (1 - e) / (1 - g * e)
        log_ratio = _clog1p(g * (1 - e) / (1 - g))
        drift = k * th * (beta_minus_d_over_g2 * step) - 2 * k * th / (gam * gam) * log_ratio
        return cls(d=d, g=g, q=q, drift=drift)


def _clog1p(z: complex) -> complex:
    if abs(z) < 1e-4:
        return z - z * z / 2 + z**3 / 3 - z**4 / 4
    return cmath.log(1 + z)


def eta(p: HestonParams, t: float) -> float:
    """2 kappa / gamma^2 / (1 - exp(-kappa t)); infinite at t = 0."""
    if t == 0:
        return math.inf
    return 2 * p.kappa / (p.gamma**2 * -math.expm1(-p.kappa * t))


def log_mgf(p: HestonParams, u: float, t: float, s0: float = 1.0) -> complex:
    """ln E[exp(u X_t)] with X_t = ln S_t - r t."""
    aux = MgfAux.of(p, u, t)
    return u * math.log(s0) + aux.drift + p.v0 * aux.q


def simple_return_strike(p: HestonParams, spec: SwapSpec, s0: float = 1.0) -> float:
    """Fair strike on squared simple returns, (1/T) sum E[(S_{i+1}/S_i - 1)^2].

    The spot level cancels from every term; ``s0`` is accepted for symmetry
    with the moment generating function only.
    """
    if not p.gamma > 0:
        raise ValidityDomain("simple-return pricer needs gamma > 0")
    T, n, r = spec.maturity, spec.periods, spec.rate
    alpha = p.alpha
    if alpha < 0:
        raise ValidityDomain(f"alpha = {alpha:.6g} < 0")
    if p.gamma**2 * T >= 1:
        raise ValidityDomain(f"gamma^2 T = {p.gamma**2 * T:.6g} >= 1")
    if not 2 < eta(p, T):
        raise ValidityDomain("need 2 < eta(T)")
    delta = spec.delta
    aux = MgfAux.of(p, 2.0, delta)
    log_base = 2 * r * delta + aux.drift + p.v0 * aux.q
    q = aux.q

    total = 0j
    for i in range(n):
        if i == 0:
            # eta -> infinity at t_0 so the CIR factor is exactly one
            log_ai = log_base
        else:
            ti = i * delta
            et = eta(p, ti)
            ratio_log = -_clog1p(-q / et)  # ln(eta / (eta - q))
            log_ai = (
                log_base
                + q * p.v0 * (et * math.exp(-p.kappa * ti) / (et - q) - 1)
                + (alpha + 1) * ratio_log
            )
        total += cmath.exp(log_ai)
    if abs(total.imag) > IMAG_TOLERANCE * abs(total.real):
        raise NonRealMgf(f"imaginary residual {total.imag:.3g} in the moment generating function")
    return (total.real + n - 2 * n * math.exp(r * delta)) / T


def simple_return_strike_bp(p: HestonParams, spec: SwapSpec, s0: float = 1.0) -> float:
    """Simple-return strike times 10^4."""
    return 1e4 * simple_return_strike(p, spec, s0)
