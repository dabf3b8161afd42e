"""Cancellation-free building blocks for exponential closed forms."""

import math

_SERIES_CUTOFF = 0.1


def expm1_ratio(a, t):
    """(exp(a t) - 1) / a, equal to t at a = 0."""
    x = a * t
    if abs(x) < 1e-8:
        return t * (1.0 + 0.5 * x + x * x / 6.0)
    return math.expm1(x) / a


def exp_remainder(x):
    """exp(-x) - 1 + x without losing digits near x = 0."""
    if abs(x) < _SERIES_CUTOFF:
        term = x * x / 2.0
        total = 0.0
        k = 2
        while abs(term) > 1e-18 * abs(total) or k == 2:
            total += term
            k += 1
            term *= -x / k
        return total
    return math.expm1(-x) + x


def expm1_minus_x(x):
    """exp(x) - 1 - x without losing digits near x = 0."""
    if abs(x) < _SERIES_CUTOFF:
        term = x * x / 2.0
        total = 0.0
        k = 2
        while abs(term) > 1e-18 * abs(total) or k == 2:
            total += term
            k += 1
            term *= x / k
        return total
    return math.expm1(x) - x


def one_minus_x_over_expm1(x):
    """1 - x / (exp(x) - 1), the limit 0 at x = 0."""
    if x == 0.0:
        return 0.0
    return expm1_minus_x(x) / math.expm1(x)


def dd_expm1_ratio(a, b, t):
    """Divided difference (g(a) - g(b)) / (a - b) of g(x) = (exp(x t) - 1) / x.

    Uses the power series sum_{k>=2} t^k / k! * h_{k-2}(a, b), with h_j the
    complete homogeneous polynomial, whenever both |a t| and |b t| are at
    most one. Outside that region the two ratios are subtracted directly;
    the limit a == b falls back to g'(a).
    """
    if max(abs(a), abs(b)) * t <= 1.0:
        total = 0.0
        h = 1.0
        bpow = 1.0
        coeff = t * t / 2.0
        k = 2
        while True:
            term = coeff * h
            total += term
            if abs(term) <= 1e-17 * abs(total) and k > 3:
                break
            k += 1
            coeff *= t / k
            bpow *= b
            h = a * h + bpow
        return total
    if a == b:
        x = a * t
        return (t * math.exp(x) * a - math.expm1(x)) / (a * a)
    return (expm1_ratio(a, t) - expm1_ratio(b, t)) / (a - b)


def geometric_sum(c, delta, periods):
    """sum_{i<periods} exp(c i delta) = (exp(c T) - 1) / (exp(c delta) - 1)."""
    if c == 0.0:
        return float(periods)
    return expm1_ratio(c, delta * periods) / expm1_ratio(c, delta)
