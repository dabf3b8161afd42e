"""High-precision reference values built independently of the package.

The discrete strike is assembled per interval from

    E[X^2] = (r d)^2 + (1 - r d) E[I] + E[I^2] / 4 - rho E[I Y]

where I = int m^2(V) and Y = int m(V) dW = f(V_end) - f(V_start) - int h(V).
Every expectation is a (double) integral of joint moments of V, and those
moments come from textbook facts (Gaussian OU marginals, lognormal GBM, the
linear moment ODEs of the CIR process), not from the package.
"""

from __future__ import annotations

from math import comb

import mpmath as mp

DPS = 18


def _gauss_moment(k):
    if k % 2:
        return 0
    out = 1
    for m in range(k - 1, 0, -2):
        out *= m
    return out


# joint moments E[V_s^a V_u^b] ------------------------------------------------

def cir_moments(kappa, theta, gamma, v0):
    k, th, g, v0 = map(mp.mpf, (kappa, theta, gamma, v0))

    def m1(t):
        return th + (v0 - th) * mp.exp(-k * t)

    # y' = -2k y + (2 k th + g^2) m1(t), y(0) = v0^2
    a = (2 * k * th + g * g) * th / (2 * k)
    b = (2 * k * th + g * g) * (v0 - th) / k
    c = v0 * v0 - a - b

    def m2(t):
        return a + b * mp.exp(-k * t) + c * mp.exp(-2 * k * t)

    def joint(a_, s, b_, u):
        if s > u:
            return joint(b_, u, a_, s)
        if a_ == 0 and b_ == 0:
            return mp.mpf(1)
        if b_ == 0:
            return m1(s) if a_ == 1 else m2(s)
        if a_ == 0:
            return m1(u) if b_ == 1 else m2(u)
        assert a_ == 1 and b_ == 1
        # E[V_u | V_s] is affine in V_s
        return th * m1(s) + mp.exp(-k * (u - s)) * (m2(s) - th * m1(s))

    return joint


def gbm_moments(mu, sigma, v0):
    mu, s2, lv = mp.mpf(mu), mp.mpf(sigma) ** 2, mp.log(v0)

    def joint(a, s, b, u):
        mean = (a + b) * lv + (mu - s2 / 2) * (a * s + b * u)
        var = s2 * (a * a * s + b * b * u + 2 * a * b * min(s, u))
        return mp.exp(mean + var / 2)

    return joint


def ou_moments(kappa, theta, gamma, v0):
    k, th, g, v0 = map(mp.mpf, (kappa, theta, gamma, v0))

    def mean(t):
        return th + (v0 - th) * mp.exp(-k * t)

    def var(t):
        return g * g / (2 * k) * (1 - mp.exp(-2 * k * t))

    def joint(a, s, b, u):
        if s > u:
            return joint(b, u, a, s)
        mx, my = mean(s), mean(u)
        sx = mp.sqrt(var(s))
        cov = mp.exp(-k * (u - s)) * var(s)
        c = cov / sx if sx > 0 else mp.mpf(0)
        e = mp.sqrt(max(var(u) - c * c, 0))
        total = mp.mpf(0)
        # X = mx + sx Z1, Y = my + c Z1 + e Z2
        for i in range(a + 1):
            for j in range(b + 1):
                for l in range(j + 1):
                    total += (
                        comb(a, i) * mx ** (a - i) * sx**i
                        * comb(b, j) * my ** (b - j) * comb(j, l) * c**l * e ** (j - l)
                        * _gauss_moment(i + l) * _gauss_moment(j - l)
                    )
        return total

    return joint


# model descriptions -----------------------------------------------------------
# each entry: (m^2 as {power: coeff}, f, h) in powers of V

def _heston(p):
    k, th, g = p.kappa, p.theta, p.gamma
    return cir_moments(k, th, g, p.v0), {1: 1}, {1: 1 / g}, {0: k * th / g, 1: -k / g}


def _hull_white(p):
    s = p.sigma
    return gbm_moments(p.mu, s, p.v0), {1: 1}, {0.5: 2 / s}, {0.5: p.mu / s - s / 4}


def _schobel_zhu(p):
    k, th, g = p.kappa, p.theta, p.gamma
    return ou_moments(k, th, g, p.v0), {2: 1}, {2: 1 / (2 * g)}, {0: g / 2, 1: k * th / g, 2: -k / g}


def _describe(params):
    name = type(params).__name__
    return {"HestonParams": _heston, "HullWhiteParams": _hull_white, "SchobelZhuParams": _schobel_zhu}[name](params)


def oracle_discrete_strike(params, T, n, r):
    """(1/T) sum_i E[(ln S_{t_{i+1}} / S_{t_i})^2] by nested mpmath quadrature."""
    with mp.workdps(DPS):
        return +_oracle(params, T, n, r)


def _oracle(params, T, n, r):
    joint, msq, f, h = _describe(params)
    rho = mp.mpf(params.rho)
    T, r = mp.mpf(T), mp.mpf(r)
    d = T / n

    def poly2(p1, s, p2, u):
        return mp.fsum(c1 * c2 * joint(a, s, b, u) for a, c1 in p1.items() for b, c2 in p2.items())

    total = mp.mpf(0)
    for i in range(n):
        t0, t1 = i * d, (i + 1) * d
        e_i = mp.quad(lambda s: poly2(msq, s, {0: 1}, s), [t0, t1])

        def square(p1, p2):
            # int int over [t0, t1]^2 split along the diagonal
            lower = mp.quad(lambda u: mp.quad(lambda s: poly2(p1, s, p2, u), [t0, u]), [t0, t1])
            upper = mp.quad(lambda u: mp.quad(lambda s: poly2(p1, s, p2, u), [u, t1]), [t0, t1])
            return lower + upper

        e_ii = square(msq, msq)
        e_iy = mp.mpf(0)
        if rho != 0:
            e_if = mp.quad(lambda s: poly2(msq, s, f, t1) - poly2(msq, s, f, t0), [t0, t1])
            e_iy = e_if - square(msq, h)
        total += (r * d) ** 2 + (1 - r * d) * e_i + e_ii / 4 - rho * e_iy
    return total / T
