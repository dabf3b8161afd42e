"""Model parameters, swap specification, validation and parameter files.

Schobel-Zhu parameters are in volatility units (the process is the
volatility, its square is the variance); nothing here ever squares them.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Union

from .errors import ValidationError


@dataclass(frozen=True)
class HestonParams:
    kappa: float
    theta: float
    gamma: float
    rho: float
    v0: float

    model = "heston"

    @property
    def alpha(self) -> float:
        """2 kappa theta / gamma^2 - 1; infinite for gamma = 0."""
        if self.gamma == 0.0:
            return math.inf
        return 2.0 * self.kappa * self.theta / self.gamma**2 - 1.0


@dataclass(frozen=True)
class HullWhiteParams:
    mu: float
    sigma: float
    rho: float
    v0: float

    model = "hull-white"


@dataclass(frozen=True)
class SchobelZhuParams:
    kappa: float
    theta: float
    gamma: float
    rho: float
    v0: float

    model = "schobel-zhu"


ModelParams = Union[HestonParams, HullWhiteParams, SchobelZhuParams]

MODELS = {cls.model: cls for cls in (HestonParams, HullWhiteParams, SchobelZhuParams)}


@dataclass(frozen=True)
class SwapSpec:
    """Equidistant sampling grid t_i = i T / n with constant rate r."""

    maturity: float
    periods: int
    rate: float = 0.0

    @property
    def delta(self) -> float:
        return self.maturity / self.periods

    def grid(self):
        return [i * self.maturity / self.periods for i in range(self.periods + 1)]


class Method(enum.Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class StrikeQuote:
    """A fair strike in annualized variance units."""

    value: float
    method: Method
    model: str
    spec: SwapSpec | None = None
    std_error: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"strike must be finite, got {self.value}")
        if self.method is Method.MONTE_CARLO and self.std_error is None:
            raise ValueError("Monte Carlo quotes carry a standard error")


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()
    warnings: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_for_violations(self):
        if self.violations:
            raise ValidationError(self.violations)


def _check_finite(obj, out):
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, float) and not math.isfinite(value):
            out.append(f"{f.name} is not finite")


def validate(params: ModelParams, spec: SwapSpec | None = None) -> ValidationReport:
    """Check per-model parameter bounds and the swap grid; never raises."""
    bad: list[str] = []
    warn: list[str] = []
    _check_finite(params, bad)

    if not -1.0 <= params.rho <= 1.0:
        bad.append("rho out of [-1,1]")

    if isinstance(params, HestonParams):
        if not params.kappa > 0:
            bad.append("kappa must be > 0")
        if params.theta < 0:
            bad.append("theta must be >= 0")
        if params.gamma < 0:
            bad.append("gamma must be >= 0")
        if params.v0 < 0:
            bad.append("v0 must be >= 0")
        if params.v0 == 0:
            warn.append("v0 = 0: closed forms stay finite but the variance starts at its boundary")
        if params.gamma > 0 and params.kappa > 0 and params.alpha < 0:
            warn.append(
                f"alpha = 2 kappa theta / gamma^2 - 1 = {params.alpha:.6g} < 0: "
                "simple-return (Zhu-Lian) pricer unavailable"
            )
    elif isinstance(params, HullWhiteParams):
        if not params.v0 > 0:
            bad.append("v0 must be > 0")
        if params.sigma < 0:
            bad.append("sigma must be >= 0")
        if params.mu <= -params.sigma**2 / 2:
            warn.append("mu <= -sigma^2/2 lies outside the tested region of the discrete formula")
    elif isinstance(params, SchobelZhuParams):
        if not params.kappa > 0:
            bad.append("kappa must be > 0")
        if params.theta < 0:
            bad.append("theta must be >= 0")
        if params.gamma < 0:
            bad.append("gamma must be >= 0")
        if params.v0 < 0:
            bad.append("v0 must be >= 0")
    else:
        bad.append(f"unknown model parameters {type(params).__name__}")

    if spec is not None:
        _check_finite(spec, bad)
        if not spec.maturity > 0:
            bad.append("T must be > 0")
        if not (isinstance(spec.periods, int) and spec.periods >= 1):
            bad.append("n must be an integer >= 1")
        if spec.rate < 0:
            bad.append("r must be >= 0")

    return ValidationReport(tuple(bad), tuple(warn))


# parameter files ---------------------------------------------------------

_FILE_KEYS = {"model", "kappa", "theta", "gamma", "rho", "v0", "mu", "sigma", "T", "n", "r"}
_SPEC_KEYS = {"T": "maturity", "n": "periods", "r": "rate"}


def params_to_dict(params: ModelParams, spec: SwapSpec | None = None) -> dict:
    out = {"model": params.model, **asdict(params)}
    if spec is not None:
        out.update(T=spec.maturity, n=spec.periods, r=spec.rate)
    return out


def params_from_dict(data: dict) -> tuple[ModelParams, SwapSpec | None]:
    """Parse the parameter-file schema; unknown or foreign keys are rejected."""
    unknown = set(data) - _FILE_KEYS
    if unknown:
        raise ValidationError([f"unknown key {k!r}" for k in sorted(unknown)])
    try:
        cls = MODELS[data["model"]]
    except KeyError:
        raise ValidationError([f"model must be one of {sorted(MODELS)}"]) from None
    names = [f.name for f in fields(cls)]
    foreign = set(data) - set(names) - set(_SPEC_KEYS) - {"model"}
    if foreign:
        raise ValidationError([f"key {k!r} is not a {cls.model} parameter" for k in sorted(foreign)])
    missing = [k for k in names if k not in data]
    if missing:
        raise ValidationError([f"missing key {k!r}" for k in missing])
    params = cls(**{k: float(data[k]) for k in names})

    spec = None
    if "T" in data:
        n = data.get("n", 1)
        if isinstance(n, float) and n.is_integer():
            n = int(n)
        spec = SwapSpec(float(data["T"]), n, float(data.get("r", 0.0)))
    elif "n" in data or "r" in data:
        raise ValidationError(["n and r require T"])
    return params, spec


def load_params(path) -> tuple[ModelParams, SwapSpec | None]:
    return params_from_dict(json.loads(Path(path).read_text()))


def dump_params(params: ModelParams, spec: SwapSpec | None = None) -> str:
    return json.dumps(params_to_dict(params, spec), indent=2)


# reference parameter sets ------------------------------------------------

HESTON_SET1 = HestonParams(kappa=6.21, theta=0.019, gamma=0.31, rho=-0.7, v0=0.010201)
SET1_SPEC = SwapSpec(maturity=1.0, periods=252, rate=0.0319)
HESTON_SET2 = HestonParams(kappa=2.0, theta=0.09, gamma=1.0, rho=-0.3, v0=0.09)
SET2_SPEC = SwapSpec(maturity=5.0, periods=60, rate=0.05)
SZ_SET = SchobelZhuParams(
    kappa=6.21, theta=math.sqrt(0.019), gamma=0.31, rho=-0.7, v0=math.sqrt(0.010201)
)
ZHU_LIAN = HestonParams(kappa=11.35, theta=0.022, gamma=0.618, rho=-0.64, v0=0.04)
ZHU_LIAN_SPEC = SwapSpec(maturity=1.0, periods=4, rate=0.1)
