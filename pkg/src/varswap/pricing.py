"""Model dispatch for the closed-form pricers."""

from __future__ import annotations

from . import heston, hullwhite, schobelzhu
from .params import HestonParams, HullWhiteParams, ModelParams, SchobelZhuParams, SwapSpec

_MODULES = {
    HestonParams: heston,
    HullWhiteParams: hullwhite,
    SchobelZhuParams: schobelzhu,
}


def model_module(params: ModelParams):
    try:
        return _MODULES[type(params)]
    except KeyError:
        raise TypeError(f"unsupported parameter type {type(params).__name__}") from None


def discrete_strike(params: ModelParams, spec: SwapSpec) -> float:
    return model_module(params).discrete_strike(params, spec)


def continuous_strike(params: ModelParams, T: float) -> float:
    return model_module(params).continuous_strike(params, T)


def model_kernels(params: ModelParams):
    """Moment kernels for the generic quadrature engine."""
    return model_module(params).kernels(params)
