"""Fair strikes of discretely and continuously sampled variance swaps.

Closed forms for the Heston, Hull-White and Schobel-Zhu stochastic
volatility models, a generic quadrature engine working from moment kernels,
large-n and small-T expansions of the discretisation gap, and a Monte Carlo
oracle.
"""

from .errors import (
    BudgetExceeded,
    DegenerateParameter,
    NumericalError,
    OrderViolation,
    ValidationError,
    VarSwapError,
)
from .framework import convex_order_gap, generic_discrete_strike, rate_structure
from .params import (
    HESTON_SET1,
    HESTON_SET2,
    SZ_SET,
    ZHU_LIAN,
    HestonParams,
    HullWhiteParams,
    SchobelZhuParams,
    SwapSpec,
    load_params,
    validate,
)
from .pricing import continuous_strike, discrete_strike, model_kernels

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "DegenerateParameter",
    "HESTON_SET1",
    "HESTON_SET2",
    "HestonParams",
    "HullWhiteParams",
    "NumericalError",
    "OrderViolation",
    "SZ_SET",
    "SchobelZhuParams",
    "SwapSpec",
    "ValidationError",
    "VarSwapError",
    "ZHU_LIAN",
    "continuous_strike",
    "convex_order_gap",
    "discrete_strike",
    "generic_discrete_strike",
    "load_params",
    "model_kernels",
    "rate_structure",
    "validate",
]
