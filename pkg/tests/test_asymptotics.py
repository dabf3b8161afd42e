from dataclasses import replace

import pytest

from varswap import asymptotics as asy
from varswap import hullwhite
from varswap.errors import IndeterminateRho0
from varswap.params import HESTON_SET1, HESTON_SET2, SZ_SET, HullWhiteParams, SwapSpec
from varswap.pricing import continuous_strike, discrete_strike

HW1 = hullwhite.match_params(HESTON_SET1, 1.0)
MODELS = [HESTON_SET1, HESTON_SET2, HW1, SZ_SET]


def scaled_gap(params, n, T=1.0, r=0.0319):
    return n * (discrete_strike(params, SwapSpec(T, n, r)) - continuous_strike(params, T))


class TestLargeN:
    @pytest.mark.parametrize("params", MODELS, ids=lambda p: p.model)
    def test_leading_coefficient(self, params):
        a1 = asy.expansion_n(params, 1.0, 0.0319).a1
        assert scaled_gap(params, 10**5) == pytest.approx(a1, rel=1e-4)

    @pytest.mark.parametrize("params", MODELS, ids=lambda p: p.model)
    def test_rho_decomposition(self, params):
        ex = asy.expansion_n(params, 1.0, 0.02)
        assert ex.a1 == pytest.approx(ex.base + ex.rho_slope * params.rho, rel=1e-12)

    @pytest.mark.parametrize("params", [HESTON_SET1, HW1, SZ_SET], ids=lambda p: p.model)
    def test_rho0_zeroes_a1(self, params):
        ex = asy.expansion_n(params, 1.0, 0.0)
        rho0 = ex.rho0()
        assert rho0 > 0
        assert asy.expansion_n(replace(params, rho=rho0), 1.0, 0.0).a1 == pytest.approx(0.0, abs=1e-14)

    def test_rho0_indeterminate(self):
        flat = HullWhiteParams(mu=0.1, sigma=0.0, rho=0.3, v0=0.04)
        with pytest.raises(IndeterminateRho0):
            asy.expansion_n(flat, 1.0, 0.0).rho0()

    def test_hull_white_higher_orders(self):
        ex = asy.hw_expansion_n(HW1, 1.0, 0.0319)
        n = 300
        gap = scaled_gap(HW1, n) / n
        assert n * n * (gap - ex.a1 / n) == pytest.approx(ex.a2, rel=1e-2)
        assert n**3 * (gap - ex.a1 / n - ex.a2 / n**2) == pytest.approx(ex.a3, rel=2e-2)

    def test_heston_gamma_polynomial(self):
        spec = SwapSpec(1.0, 12, 0.0319)
        h0, h1, h2 = asy.heston_gamma_poly(HESTON_SET1, spec)
        scale = 8 * 12 * HESTON_SET1.kappa**3
        for g in (0.1, 0.31, 0.9):
            assert (h0 + h1 * g + h2 * g * g) / scale == pytest.approx(
                discrete_strike(replace(HESTON_SET1, gamma=g), spec), rel=1e-12
            )

    def test_hull_white_small_sigma(self):
        spec = SwapSpec(1.0, 12, 0.0319)
        h0, h1 = asy.hw_sigma_expansion(HW1, spec)
        for s in (1e-3, 2e-3):
            k = discrete_strike(replace(HW1, sigma=s), spec)
            assert abs(k - h0 - h1 * s) < 2e-3 * s * abs(h1) + 1e-14


class TestSmallT:
    @pytest.mark.parametrize("params", [HESTON_SET1, HW1, SZ_SET], ids=lambda p: p.model)
    @pytest.mark.parametrize("n", [1, 12])
    def test_residual_order(self, params, n):
        st = asy.small_t(params, 0.0319, n)
        power = 3 if st.b2 is not None else 2

        def resid(T):
            k = discrete_strike(params, SwapSpec(T, n, 0.0319))
            return k - st.level - st.b1 * T - (st.b2 or 0.0) * T * T

        assert resid(2**-8) / resid(2**-9) == pytest.approx(2**power, rel=0.05)

    @pytest.mark.parametrize("params", [HESTON_SET1, HW1, SZ_SET], ids=lambda p: p.model)
    def test_gap_slope(self, params):
        st = asy.small_t(params, 0.0319, 4)
        T = 1e-4
        gap = discrete_strike(params, SwapSpec(T, 4, 0.0319)) - continuous_strike(params, T)
        assert gap / T == pytest.approx(st.gap_coefficient, rel=1e-2)


class TestReport:
    @pytest.mark.parametrize("params", MODELS, ids=lambda p: p.model)
    def test_as_dict(self, params):
        d = asy.expansion_report(params, SwapSpec(1.0, 12, 0.0319)).as_dict()
        assert d["model"] == params.model
        assert {"a1", "rho_slope", "rho0", "b1", "small_T_gap_coefficient"} <= set(d)

    def test_report_extras(self):
        d = asy.expansion_report(HESTON_SET1, SwapSpec(1.0, 12, 0.0)).as_dict()
        assert {"h0", "h1", "h2"} <= set(d)
        d = asy.expansion_report(SZ_SET, SwapSpec(1.0, 12, 0.0)).as_dict()
        assert {"d1", "d2"} <= set(d)
