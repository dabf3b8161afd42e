"""Randomised structural properties of the closed forms."""

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varswap.framework import generic_discrete_strike
from varswap.params import HestonParams, HullWhiteParams, SchobelZhuParams, SwapSpec
from varswap.pricing import continuous_strike, discrete_strike, model_kernels

heston_params = st.builds(
    HestonParams,
    kappa=st.floats(0.2, 10),
    theta=st.floats(0.005, 0.2),
    gamma=st.floats(0.05, 1.0),
    rho=st.floats(-1, 1),
    v0=st.floats(0.005, 0.2),
)
hw_params = st.builds(
    HullWhiteParams,
    mu=st.floats(-1.5, 1.5),
    sigma=st.floats(0.05, 1.0),
    rho=st.floats(-1, 1),
    v0=st.floats(0.005, 0.2),
).filter(lambda p: min(abs(2 * p.mu + p.sigma**2), abs(p.mu + p.sigma**2), abs(4 * p.mu + 3 * p.sigma**2)) > 1e-3)
sz_params = st.builds(
    SchobelZhuParams,
    kappa=st.floats(0.2, 10),
    theta=st.floats(0.05, 0.4),
    gamma=st.floats(0.05, 0.6),
    rho=st.floats(-1, 1),
    v0=st.floats(0.05, 0.4),
)
any_params = st.one_of(heston_params, hw_params, sz_params)
specs = st.builds(SwapSpec, maturity=st.floats(0.1, 3.0), periods=st.integers(1, 60), rate=st.floats(0, 0.1))


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


@settings(max_examples=60, deadline=None)
@given(any_params, specs)
def test_rate_quadratic(params, spec):
    base = discrete_strike(params, replace(spec, rate=0.0))
    kc = continuous_strike(params, spec.maturity)
    step = spec.delta
    r = spec.rate
    assert rel(discrete_strike(params, spec), base - step * kc * r + step * r * r) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.one_of(heston_params, hw_params), specs, st.floats(-1, 1))
def test_rho_affine(params, spec, rho):
    lo = discrete_strike(replace(params, rho=-1.0), spec)
    hi = discrete_strike(replace(params, rho=1.0), spec)
    expected = lo + (hi - lo) * (rho + 1) / 2
    assert abs(discrete_strike(replace(params, rho=rho), spec) - expected) < 1e-9 * max(abs(lo), abs(hi))


@settings(max_examples=60, deadline=None)
@given(any_params, st.floats(0.1, 3.0), st.integers(1, 400))
def test_gap_nonnegative_without_rate_and_correlation(params, T, n):
    p = replace(params, rho=0.0)
    assert discrete_strike(p, SwapSpec(T, n, 0.0)) - continuous_strike(p, T) >= -1e-15


@settings(max_examples=25, deadline=None)
@given(any_params, st.floats(0.1, 3.0), st.integers(1, 30), st.floats(0, 0.1))
def test_quadrature_agrees(params, T, n, r):
    spec = SwapSpec(T, n, r)
    quad = generic_discrete_strike(model_kernels(params), spec).value
    assert rel(quad, discrete_strike(params, spec)) < 1e-8


@settings(max_examples=30, deadline=None)
@given(any_params, st.floats(0.1, 3.0))
def test_discrete_converges_to_continuous(params, T):
    kc = continuous_strike(params, T)
    g1 = discrete_strike(params, SwapSpec(T, 1000, 0.02)) - kc
    g2 = discrete_strike(params, SwapSpec(T, 2000, 0.02)) - kc
    assert g2 == pytest.approx(g1 / 2, rel=0.05, abs=1e-12 * kc)
