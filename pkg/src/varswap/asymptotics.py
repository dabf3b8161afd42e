"""Leading coefficients of the discrete strike in 1/n, small T and vol-of-vol.

Every coefficient is evaluated from its closed form. Where a literal
transcription would cancel O(n) terms (the Heston gamma polynomial, the
Hull-White sigma expansion near mu = 0) the same expression is regrouped
through the stable primitives in ``_numerics``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import heston, hullwhite, schobelzhu
from ._numerics import dd_expm1_ratio, exp_remainder, expm1_ratio, geometric_sum, one_minus_x_over_expm1
from .errors import IndeterminateRho0
from .params import HestonParams, HullWhiteParams, SchobelZhuParams, SwapSpec


@dataclass(frozen=True)
class NExpansion:
    """K_d(n) = K_c + a1/n + a2/n^2 + a3/n^3 + ..., with a1 = base + rho_slope * rho."""

    a1: float
    base: float
    rho_slope: float
    a2: float | None = None
    a3: float | None = None
    extras: dict = field(default_factory=dict)

    def rho0(self) -> float:
        """Correlation at which a1 changes sign."""
        if self.rho_slope == 0.0:
            raise IndeterminateRho0("a1 does not depend on rho")
        return -self.base / self.rho_slope


@dataclass(frozen=True)
class SmallT:
    """K_d(n) = V0-level + b1 T + b2 T^2 + ...; gap_coefficient is the T-slope of K_d - K_c."""

    level: float
    b1: float
    b2: float | None
    gap_coefficient: float


@dataclass(frozen=True)
class ExpansionReport:
    model: str
    a: tuple
    rho_slope: float
    rho0: float | None
    rho0_slope_sign: int
    small_t: SmallT
    extras: dict

    def as_dict(self) -> dict:
        out = {
            "model": self.model,
            **{f"a{i + 1}": v for i, v in enumerate(self.a)},
            "rho_slope": self.rho_slope,
            "rho0": self.rho0,
            "rho0_slope_sign": self.rho0_slope_sign,
            "b1": self.small_t.b1,
            "b2": self.small_t.b2,
            "small_T_gap_coefficient": self.small_t.gap_coefficient,
        }
        out.update(self.extras)
        return out


# Heston ---------------------------------------------------------------------

def heston_c1(p: HestonParams, T: float) -> float:
    k, th, g, v0 = p.kappa, p.theta, p.gamma, p.v0
    e1 = math.expm1(-k * T)
    e2 = math.expm1(-2 * k * T)
    return ((g * g * th - 2 * k * (v0 - th) ** 2) * e2 + 2 * (v0 - th) * e1 * (g * g * e1 - 4 * k * th)) / (16 * k * k)


def heston_expansion_n(p: HestonParams, T: float, r: float) -> NExpansion:
    k, th, g, v0 = p.kappa, p.theta, p.gamma, p.v0
    kc = heston.continuous_strike(p, T)
    c1 = heston_c1(p, T)
    slope = g * (th - v0) / (2 * k) * -math.expm1(-k * T) - th * g * T / 2
    base = r * r * T - r * T * kc + (th * th / 4 + th * g * g / (8 * k)) * T + c1
    return NExpansion(a1=base + slope * p.rho, base=base, rho_slope=slope, extras={"c1": c1})


def heston_small_t(p: HestonParams, r: float, n: int) -> SmallT:
    k, th, g, rho, v0 = p.kappa, p.theta, p.gamma, p.rho, p.v0
    gap = ((v0 - 2 * r) ** 2 - 2 * rho * v0 * g) / (4 * n)
    b1 = k * (th - v0) / 2 + gap
    b2 = (
        k * k * (v0 - th) / 6
        + ((v0 - th) * k * (g * rho + 2 * r - v0) + g * g * v0 / 2) / (4 * n)
        + (g * rho * k * (v0 + th) - g * g * v0 / 2) / (12 * n * n)
    )
    return SmallT(level=v0, b1=b1, b2=b2, gap_coefficient=gap)


def heston_gamma_poly(p: HestonParams, spec: SwapSpec) -> tuple[float, float, float]:
    """(h0, h1, h2) with K_d = (h0 + h1 gamma + h2 gamma^2) / (8 n kappa^3 T); p.gamma is ignored."""
    k, th, rho, v0 = p.kappa, p.theta, p.rho, p.v0
    T, n, r = spec.maturity, spec.periods, spec.rate
    x = k * T / n
    neg_tanh = -math.tanh(x / 2)  # (1 - e^x) / (1 + e^x)
    one_m_e1 = -math.expm1(-k * T)
    e2 = math.expm1(-2 * k * T)
    psi = one_minus_x_over_expm1(x)  # (n + kappa T / (1 - e^x)) / n

    h0 = (
        2 * n * k * (v0 - th) ** 2 * e2 * neg_tanh
        + 2 * k * T * (k * k * T * (th - 2 * r) ** 2 + 4 * k * k * n * th)
        + 4 * (v0 - th) * (2 * k * k * n + k * k * T * (th - 2 * r)) * one_m_e1
    )
    # n theta (n - n e^{-x} - kappa T) = -n^2 theta (e^{-x} - 1 + x)
    h1 = 8 * rho * k * (-n * n * th * exp_remainder(x) - (v0 - th) * one_m_e1 * n * psi)
    h2 = (
        n * (th - 2 * v0) * e2 * neg_tanh
        + 2 * n * n * th * exp_remainder(x)
        + 4 * (v0 - th) * one_m_e1 * n * psi
    )
    return h0, h1, h2


# Hull-White -------------------------------------------------------------------

def hw_expansion_n(p: HullWhiteParams, T: float, r: float) -> NExpansion:
    mu, s, v0 = p.mu, p.sigma, p.v0
    kc = hullwhite.continuous_strike(p, T)
    c2 = 2 * mu + s * s
    c3 = 3 * (4 * mu + s * s) / 8
    second = expm1_ratio(c2, T)  # (e^{c2 T} - 1) / (2 mu + sigma^2)
    third = 3 / 8 * expm1_ratio(c3, T)  # (e^{c3 T} - 1) / (4 mu + sigma^2)
    base = r * r * T - r * T * kc + v0 * v0 / 4 * second
    slope = -4 * s * v0**1.5 / 3 * third
    rho = p.rho
    a2 = -v0 * v0 * s * s * T / 24 * second - rho * v0**1.5 * s * T * (4 * mu - 3 * s * s) / 36 * third
    a3 = (
        -mu * T * T * v0 * v0 * (mu + s * s) / 48 * second
        + mu * T * T * rho * s * v0**1.5 * (4 * mu + 3 * s * s) / 72 * third
    )
    return NExpansion(a1=base + slope * rho, base=base, rho_slope=slope, a2=a2, a3=a3)


def hw_small_t(p: HullWhiteParams, r: float, n: int) -> SmallT:
    mu, s, rho, v0 = p.mu, p.sigma, p.rho, p.v0
    gap = ((v0 - 2 * r) ** 2 - 2 * rho * v0**1.5 * s) / (4 * n)
    b1 = v0 * mu / 2 + gap
    b2 = (
        v0 * mu * mu / 6
        + v0 / (4 * n) * (s * s * v0 / 2 - 3 * rho * math.sqrt(v0) * s * (s * s + 4 * mu) / 8 + mu * (v0 - 2 * r))
        + v0**1.5 * s * (rho * (3 * s * s - 4 * mu) - 4 * s * math.sqrt(v0)) / (96 * n * n)
    )
    return SmallT(level=v0, b1=b1, b2=b2, gap_coefficient=gap)


def hw_sigma_expansion(p: HullWhiteParams, spec: SwapSpec) -> tuple[float, float]:
    """(h0, h1) with K_d = h0 + h1 sigma + O(sigma^2); p.sigma is ignored.

    The mu^-2 factors of the displayed coefficients are divided differences
    of x -> (exp(x delta) - 1) / x, evaluated without cancellation.
    """
    mu, rho, v0 = p.mu, p.rho, p.v0
    T, n, r = spec.maturity, spec.periods, spec.rate
    delta = spec.delta
    kc = v0 * expm1_ratio(mu, T) / T
    h0 = r * r * T / n + (1 - r * T / n) * kc + v0 * v0 / (2 * T) * geometric_sum(2 * mu, delta, n) * dd_expm1_ratio(
        2 * mu, mu, delta
    )
    c = 1.5 * mu
    h1 = -rho * v0**1.5 / T * geometric_sum(c, delta, n) * dd_expm1_ratio(c, mu, delta)
    return h0, h1


# Schobel-Zhu ----------------------------------------------------------------

def sz_d_terms(p: SchobelZhuParams, T: float) -> dict:
    k, th, g, v0 = p.kappa, p.theta, p.gamma, p.v0
    D = math.expm1(-k * T) / k
    E = 4 * v0**4 * k * k - 4 * th**4 * k * k - 3 * g**4 - 12 * g * g * th * th * k
    d1 = (
        T * v0**4 / 4
        - E * (T + D) / (16 * k * k)
        + (3 * v0 * v0 * g * g / 4 + E / (32 * k) + k * v0**3 * (th - v0) / 2) * D**2
        + (
            2 * th * k * k * v0**3 / 3
            - v0**4 * k * k / 6
            - E / 48
            - v0 * v0 * th * th * k * k / 2
            - g * g * k * v0 * th
            + 3 * v0 * v0 * k * g * g / 4
            - g**4 / 4
        )
        * D**3
        + (
            E / (8 * k)
            + 3 * g * g * (th - v0) * th
            + 3 * v0 * v0 * g * g / 2
            + v0 * k * (th - v0) * (2 * th * th - th * v0 + v0 * v0)
        )
        * k
        * k
        * D**4
        / 8
    )
    d2 = T * (g * g + 2 * k * th * th) + (2 * k * (th * th - v0 * v0) + g * g) * D + k / 2 * (
        g * g - 2 * k * (th - v0) ** 2
    ) * D**2
    return {"d1": d1, "d2": d2, "D": D, "E": E}


def sz_expansion_n(p: SchobelZhuParams, T: float, r: float) -> NExpansion:
    terms = sz_d_terms(p, T)
    kc = schobelzhu.continuous_strike(p, T)
    base = r * r * T - r * T * kc + terms["d1"]
    slope = -terms["d2"] * p.gamma / (2 * p.kappa)
    return NExpansion(a1=base + slope * p.rho, base=base, rho_slope=slope, extras=terms)


def sz_small_t(p: SchobelZhuParams, r: float, n: int) -> SmallT:
    k, th, g, rho, v0 = p.kappa, p.theta, p.gamma, p.rho, p.v0
    v2 = v0 * v0
    b1 = k * v0 * (th - v0) + g * g / 2 + (r * r - r * v2 + v2 * (v2 - 4 * rho * g) / 4) / n
    gap = ((v2 - 2 * r) ** 2 - 4 * rho * v2 * g) / (4 * n)
    return SmallT(level=v2, b1=b1, b2=None, gap_coefficient=gap)


# report -----------------------------------------------------------------------

def expansion_n(params, T: float, r: float) -> NExpansion:
    if isinstance(params, HestonParams):
        return heston_expansion_n(params, T, r)
    if isinstance(params, HullWhiteParams):
        return hw_expansion_n(params, T, r)
    if isinstance(params, SchobelZhuParams):
        return sz_expansion_n(params, T, r)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def small_t(params, r: float, n: int) -> SmallT:
    if isinstance(params, HestonParams):
        return heston_small_t(params, r, n)
    if isinstance(params, HullWhiteParams):
        return hw_small_t(params, r, n)
    if isinstance(params, SchobelZhuParams):
        return sz_small_t(params, r, n)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def expansion_report(params, spec: SwapSpec) -> ExpansionReport:
    T, n, r = spec.maturity, spec.periods, spec.rate
    ex = expansion_n(params, T, r)
    try:
        rho0 = ex.rho0()
    except IndeterminateRho0:
        rho0 = None
    a = tuple(v for v in (ex.a1, ex.a2, ex.a3) if v is not None)
    extras = dict(ex.extras)
    if isinstance(params, HestonParams):
        extras.update(zip(("h0", "h1", "h2"), heston_gamma_poly(params, spec)))
    elif isinstance(params, HullWhiteParams):
        extras.update(zip(("h0", "h1"), hw_sigma_expansion(params, spec)))
    return ExpansionReport(
        model=params.model,
        a=a,
        rho_slope=ex.rho_slope,
        rho0=rho0,
        rho0_slope_sign=int(math.copysign(1, ex.rho_slope)) if ex.rho_slope else 0,
        small_t=small_t(params, r, n),
        extras=extras,
    )
