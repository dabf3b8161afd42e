"""Model-agnostic discrete strike from moment kernels, plus rate-structure utilities.

For a model dS/S = r dt + m(V) dW1, dV = mu(V) dt + sigma(V) dW2 the squared
log-return over [t, t + delta] has expectation

    r^2 delta^2 + (1 - rho^2 - r delta) int m1 - rho int m5
    + 1/4 iint m2 + rho^2 E[(f(V_{t+delta}) - f(V_t))^2]
    + rho^2 iint m3 + rho iint m4

with f(v) = int_0^v m/sigma and h = mu f' + sigma^2 f''/2. The engine never
derives f and h itself: whoever builds a :class:`ModelKernels` supplies the
moments directly and is responsible for their integrability on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import KernelFailure, NoConvergence, StructureViolation
from .params import SwapSpec

ORDERS = (8, 16, 32, 64)
_MAX_POINTS = 1 << 21


@dataclass(frozen=True)
class ModelKernels:
    """Moment kernels evaluated on numpy arrays.

    m1(s) = E[m^2(V_s)], m2(s, u) = E[m^2(V_s) m^2(V_u)],
    m3(s, u) = E[h(V_s) h(V_u)], m4(s, u) = E[h(V_s) m^2(V_u)],
    m5(t, s, delta) = E[(f(V_{t+delta}) - f(V_t)) (2 rho h(V_s) + m^2(V_s))],
    f_increment_sq(t, delta) = E[(f(V_{t+delta}) - f(V_t))^2].
    m2, m3 and m4 must accept either time ordering; m4 is not assumed symmetric.
    """

    m1: Callable
    m2: Callable
    m3: Callable
    m4: Callable
    m5: Callable
    f_increment_sq: Callable
    rho: float


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    order: int


def constant_variance_kernels(level: float) -> ModelKernels:
    """Deterministic constant variance: every stochastic term vanishes."""

    def zero2(s, u):
        return np.zeros(np.broadcast(s, u).shape)

    return ModelKernels(
        m1=lambda s: np.full(np.shape(s), level),
        m2=lambda s, u: np.full(np.broadcast(s, u).shape, level * level),
        m3=zero2,
        m4=zero2,
        m5=lambda t, s, d: np.zeros(np.broadcast(t, s).shape),
        f_increment_sq=lambda t, d: np.zeros(np.shape(t)),
        rho=0.0,
    )


def _nodes(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


def _interval_moments(k: ModelKernels, starts, delta, order):
    """Per-interval integrals (I1, I5, F, I2, I3, I4) at one Gauss-Legendre order."""
    x, w = _nodes(order)
    t = starts[:, None]
    s = t + delta * x[None, :]
    i1 = delta * (k.m1(s) @ w)
    i5 = delta * (k.m5(t, s, delta) @ w)
    f = np.asarray(k.f_increment_sq(starts, delta), dtype=float) * np.ones_like(starts)

    # triangle a <= b inside the interval: b = delta x_j, a = b x_l
    b = delta * x
    lo = t[:, :, None] + b[None, :, None] * x[None, None, :]
    hi = np.broadcast_to(t[:, :, None] + b[None, :, None], lo.shape)
    weight = delta * (w * b)[:, None] * w[None, :]

    def square(kernel):
        vals = kernel(lo, hi) + kernel(hi, lo)
        return np.einsum("ijl,jl->i", vals, weight)

    return i1, i5, f, square(k.m2), square(k.m3), square(k.m4)


def _strike_at_order(k: ModelKernels, spec: SwapSpec, order: int) -> float:
    T, n, r = spec.maturity, spec.periods, spec.rate
    delta = spec.delta
    rho = k.rho
    chunk = max(1, _MAX_POINTS // (order * order))
    total = 0.0
    for first in range(0, n, chunk):
        starts = delta * np.arange(first, min(n, first + chunk), dtype=float)
        try:
            i1, i5, f, i2, i3, i4 = _interval_moments(k, starts, delta, order)
        except Exception as exc:  # user-supplied callables
            raise KernelFailure(f"kernel evaluation failed: {exc}") from exc
        per = (
            (r * delta) ** 2
            + (1 - rho * rho - r * delta) * i1
            - rho * i5
            + 0.25 * i2
            + rho * rho * f
            + rho * rho * i3
            + rho * i4
        )
        total += math.fsum(per)
    if not math.isfinite(total):
        raise KernelFailure("kernels produced a non-finite value")
    return total / T


def generic_discrete_strike(k: ModelKernels, spec: SwapSpec, tol: float = 1e-10) -> QuadratureResult:
    """Discrete fair strike by Gauss-Legendre quadrature of the kernels.

    Orders 8, 16, 32, 64 are tried in turn; the error estimate is the change
    from the previous order and the first order whose change is below
    ``tol`` (relative) is returned.
    """
    prev = None
    for order in ORDERS:
        value = _strike_at_order(k, spec, order)
        if prev is not None:
            err = abs(value - prev)
            if err <= tol * abs(value) or err < 1e-300:
                return QuadratureResult(value, err, order)
        prev = value
    raise NoConvergence(f"quadrature change {err:.3g} above tolerance {tol:g} at order {ORDERS[-1]}")


# rate structure -------------------------------------------------------------

@dataclass(frozen=True)
class RateStructure:
    """K_d(r) = b(n) - (T/n) K_c r + (T/n) r^2."""

    b_of_n: float
    continuous: float
    critical_rate: float
    spec: SwapSpec

    def sensitivity(self, r: float) -> float:
        """dK_d/dr = (T/n)(2r - K_c)."""
        return self.spec.maturity / self.spec.periods * (2 * r - self.continuous)

    def strike(self, r: float) -> float:
        step = self.spec.maturity / self.spec.periods
        return self.b_of_n - step * self.continuous * r + step * r * r


def rate_structure(price_at: Callable[[float], float], spec: SwapSpec, continuous: float,
                   probes=(0.01, 0.05), rtol: float = 1e-10) -> RateStructure:
    """Extract b(n) = K_d(0) and verify the quadratic-in-r identity at the probe rates."""
    rs = RateStructure(price_at(0.0), continuous, continuous / 2, spec)
    for r in probes:
        actual = price_at(r)
        expected = rs.strike(r)
        if abs(actual - expected) > rtol * max(abs(actual), abs(expected)):
            raise StructureViolation(
                f"K_d({r}) = {actual!r} but quadratic reconstruction gives {expected!r}"
            )
    return rs


@dataclass(frozen=True)
class GapResult:
    gap: float
    discrete: float
    continuous: float

    @property
    def violates_convex_order(self) -> bool:
        """Discrete strike below the continuous one."""
        return self.gap < 0


def convex_order_gap(params, spec: SwapSpec) -> GapResult:
    """Signed K_d - K_c for any supported model."""
    from .pricing import continuous_strike, discrete_strike

    kd = discrete_strike(params, spec)
    kc = continuous_strike(params, spec.maturity)
    return GapResult(kd - kc, kd, kc)
