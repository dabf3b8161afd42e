"""Acceptance criteria, one PASS/FAIL line each at the stated tolerance."""

import math
import time
from dataclasses import replace

import numpy as np

from varswap import asymptotics as asy
from varswap import heston, hullwhite
from varswap.framework import generic_discrete_strike
from varswap.montecarlo import McConfig, mc_discrete_strike
from varswap.params import HESTON_SET1, HESTON_SET2, SZ_SET, ZHU_LIAN, ZHU_LIAN_SPEC, SwapSpec
from varswap.pricing import continuous_strike, discrete_strike, model_kernels

R1, R2 = 0.0319, 0.05
HW1 = hullwhite.match_params(HESTON_SET1, 1.0)
HW2 = hullwhite.match_params(HESTON_SET2, 5.0)
FIVE_SETS = [
    ("Heston set 1", HESTON_SET1, 1.0, R1),
    ("Heston set 2", HESTON_SET2, 5.0, R2),
    ("HW matched set 1", HW1, 1.0, R1),
    ("HW matched set 2", HW2, 5.0, R2),
    ("SZ", SZ_SET, 1.0, R1),
]
THREE_MODELS = [("Heston", HESTON_SET1), ("HW", HW1), ("SZ", SZ_SET)]


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def test_criterion_1_matching(verdict):
    start = time.perf_counter()
    m1 = hullwhite.match_params(HESTON_SET1, 1.0)
    m2 = hullwhite.match_params(HESTON_SET2, 5.0)
    m3 = hullwhite.match_params(HESTON_SET1, 1 / 12)
    elapsed = time.perf_counter() - start
    checks = {
        "set1 mu": abs(m1.mu - 1.003) <= 0.001,
        "set1 sigma": abs(m1.sigma - 0.420) <= 0.005,
        "set2 mu": abs(m2.mu) <= 1e-6,
        "set2 sigma": abs(m2.sigma - 0.52) <= 0.01,
        "T=1/12 mu": abs(m3.mu - 4.03) <= 0.01,
        "T=1/12 sigma": abs(m3.sigma - 1.78) <= 0.01,
        "runtime": elapsed < 1.0,
    }
    failed = [k for k, ok in checks.items() if not ok]
    ok = verdict(
        1,
        not failed,
        f"set1 (mu, sigma) = ({m1.mu:.6f}, {m1.sigma:.6f}) vs (1.003 +/- 0.001, 0.420 +/- 0.005); "
        f"set2 = ({m2.mu:.2e}, {m2.sigma:.6f}) vs (<= 1e-6, 0.52 +/- 0.01); "
        f"T=1/12 = ({m3.mu:.6f}, {m3.sigma:.6f}) vs (4.03 +/- 0.01, 1.78 +/- 0.01); "
        f"{elapsed:.4f} s; failed: {failed or 'none'}",
    )
    assert ok, failed


def test_criterion_2_critical_rate(verdict):
    r_star = continuous_strike(HESTON_SET1, 1.0) / 2
    ok = verdict(2, abs(r_star - 0.0088) <= 0.00005, f"r* = {100 * r_star:.5f}% vs 0.88% +/- 0.005%")
    assert ok


def test_criterion_3_zhu_lian(verdict):
    value = heston.simple_return_strike_bp(ZHU_LIAN, ZHU_LIAN_SPEC)
    ok = verdict(3, abs(value - 263.2) <= 0.1, f"simple-return strike x 1e4 = {value:.4f} vs 263.2 +/- 0.1")
    assert ok


def test_criterion_4_oracle_triangle(verdict):
    start = time.perf_counter()
    cfg = McConfig(paths=10**6, substeps=8)
    worst_rel, worst_z, failures = 0.0, 0.0, []
    for name, params, T, r in FIVE_SETS:
        kernels = model_kernels(params)
        for n in (1, 4, 12, 52, 252):
            spec = SwapSpec(T, n, r)
            closed = discrete_strike(params, spec)
            quad = generic_discrete_strike(kernels, spec).value
            mc = mc_discrete_strike(params, spec, cfg)
            e, z = rel(quad, closed), mc.z_score(closed)
            print(f"  {name:17s} n={n:3d} closed={closed:.10f} quad rel={e:.1e} mc={mc.mean:.8f} z={z:+.2f}")
            worst_rel, worst_z = max(worst_rel, e), max(worst_z, abs(z))
            if e > 1e-6 or abs(z) > 3:
                failures.append(f"{name} n={n}")
    elapsed = time.perf_counter() - start
    ok = verdict(
        4,
        not failures and elapsed < 600,
        f"25 cases: max quadrature rel diff {worst_rel:.1e} (tol 1e-6), max |z| {worst_z:.2f} (tol 3), "
        f"{elapsed:.0f} s (limit 600); failures: {failures or 'none'}",
    )
    assert ok


def test_criterion_5_structure_identities(verdict):
    worst = {}
    rates = np.linspace(0.0, 0.1, 11)
    for name, params in THREE_MODELS:
        for n in (1, 12, 252):
            base = SwapSpec(1.0, n, 0.0)
            kc = continuous_strike(params, 1.0)
            b = discrete_strike(params, base)
            step = 1.0 / n
            for r in rates:
                actual = discrete_strike(params, replace(base, rate=float(r)))
                worst["r-quadratic"] = max(worst.get("r-quadratic", 0), rel(actual, b - step * kc * r + step * r * r))

    rhos = np.linspace(-1, 1, 11)
    spec = SwapSpec(1.0, 12, R1)
    for name, params in THREE_MODELS[:2]:
        lo, hi = (discrete_strike(replace(params, rho=x), spec) for x in (-1.0, 1.0))
        for x in rhos:
            line = lo + (hi - lo) * (x + 1) / 2
            actual = discrete_strike(replace(params, rho=float(x)), spec)
            worst["rho-affine"] = max(worst.get("rho-affine", 0), rel(actual, line))
    nodes = (-1.0, 0.0, 1.0)
    vals = [discrete_strike(replace(SZ_SET, rho=x), spec) for x in nodes]
    quad = np.polyfit(nodes, vals, 2)
    for x in rhos:
        worst["SZ rho-quadratic"] = max(
            worst.get("SZ rho-quadratic", 0), rel(discrete_strike(replace(SZ_SET, rho=float(x)), spec), np.polyval(quad, x))
        )
    for n in (1, 12, 252):
        sp = SwapSpec(1.0, n, R1)
        h0, h1, h2 = asy.heston_gamma_poly(HESTON_SET1, sp)
        scale = 8 * n * HESTON_SET1.kappa**3 * sp.maturity
        for g in (0.05, 0.1, 0.31, 0.5, 0.8):
            recon = (h0 + h1 * g + h2 * g * g) / scale
            worst["Heston gamma-quadratic"] = max(
                worst.get("Heston gamma-quadratic", 0), rel(discrete_strike(replace(HESTON_SET1, gamma=g), sp), recon)
            )
    ok = verdict(
        5,
        all(v <= 1e-10 for v in worst.values()),
        ", ".join(f"{k} max rel {v:.1e}" for k, v in worst.items()) + " (tol 1e-10)",
    )
    assert ok


def _gap(params, T, n, r):
    return discrete_strike(params, SwapSpec(T, n, r)) - continuous_strike(params, T)


def test_criterion_6_expansions(verdict):
    notes, ok = [], True
    for name, params in THREE_MODELS:
        a1 = asy.expansion_n(params, 1.0, R1).a1
        ratio = abs(100 * _gap(params, 1.0, 100, R1) - a1) / abs(10**4 * _gap(params, 1.0, 10**4, R1) - a1)
        ok &= ratio >= 50
        notes.append(f"{name} a1 ratio {ratio:.1f}")

    ex = asy.hw_expansion_n(HW1, 1.0, R1)

    def second(n):
        return n * n * (_gap(HW1, 1.0, n, R1) - ex.a1 / n) - ex.a2

    def third(n):
        return n**3 * (_gap(HW1, 1.0, n, R1) - ex.a1 / n - ex.a2 / n**2) - ex.a3

    r2 = abs(second(100) / second(10**4))
    r3 = abs(third(10) / third(1000))
    ok &= r2 >= 50 and r3 >= 50
    notes.append(f"HW a2 ratio {r2:.1f} (n 1e2 -> 1e4), a3 ratio {r3:.1f} (n 1e1 -> 1e3)")

    # small T: residual after the stated terms scales like the next power of T
    worst = 0.0
    for name, params in THREE_MODELS:
        for n in (1, 12):
            st = asy.small_t(params, R1, n)
            power = 3 if st.b2 is not None else 2
            grid = [2.0**-k for k in range(4, 11)]
            res = [
                discrete_strike(params, SwapSpec(T, n, R1)) - st.level - st.b1 * T - (st.b2 or 0.0) * T * T
                for T in grid
            ]
            for a, b in zip(res, res[1:]):
                worst = max(worst, abs(math.log2(abs(a / b)) - power))
    ok &= worst <= 0.2
    notes.append(f"small-T halving exponent off by at most {worst:.3f} (tol 0.2)")
    verdict(6, ok, "; ".join(notes) + " (ratio tol 50)")
    assert ok


def test_criterion_7_sign_regimes(verdict):
    notes, ok = [], True
    min_gap = math.inf
    for name, params in THREE_MODELS:
        p0 = replace(params, rho=0.0)
        for n in range(1, 513):
            min_gap = min(min_gap, _gap(p0, 1.0, n, 0.0))
    ok &= min_gap >= 0
    notes.append(f"min gap at r=0, rho=0 over n=1..512: {min_gap:.3e}")

    positive = [(name, _gap(replace(p, rho=0.7), 1.0, 250, R1)) for name, p in THREE_MODELS]
    ok &= any(g < 0 for _, g in positive)
    notes.append("rho=+0.7, n=250 gaps " + ", ".join(f"{k} {g:.3e}" for k, g in positive))

    rho0 = []
    for name, params in THREE_MODELS:
        values = np.linspace(-1, 1, 201)
        gaps = [_gap(replace(params, rho=float(x)), 1.0, 250, 0.0) for x in values]
        crossing = [values[i] for i in range(200) if gaps[i] > 0 >= gaps[i + 1]]
        root = crossing[0] if crossing else None
        rho0.append((name, root))
        ok &= root is not None and root > 0
    notes.append("rho0 at r=0: " + ", ".join(f"{k} {v if v is None else round(float(v), 3)}" for k, v in rho0))
    verdict(7, ok, "; ".join(notes))
    assert ok
