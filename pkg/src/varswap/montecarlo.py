"""Monte Carlo oracle for discrete and continuous fair strikes.

Variance (or volatility) transitions are sampled exactly: noncentral
chi-square for the CIR process, lognormal for Hull-White, Gaussian for the
OU volatility. Between grid points the time integrals are drawn as
Gaussians with their exact mean and variance given the two endpoints (for
Hull-White up to a small-step expansion). The squared log return only
depends on these two conditional moments, so the estimate carries no
discretisation bias beyond that expansion. The log return follows from

    X = r delta - I/2 + rho (f(V_end) - f(V_start) - int h(V)) + sqrt((1 - rho^2) I) G

with I = int m^2(V) and G standard normal.

The discrete strike is estimated by stratifying paths over sampling
intervals: path j only simulates interval j mod n, jumping exactly from 0
to the interval start. Each interval then contributes an independent sample
mean and the standard error combines them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import BudgetExceeded, DegenerateParameter
from .params import HestonParams, HullWhiteParams, SchobelZhuParams, SwapSpec

BLOCK_PATHS = 1 << 15
DEFAULT_BUDGET = 4 * 10**9


@dataclass(frozen=True)
class McConfig:
    """paths counts simulated trajectories; antithetic twins count as two."""

    paths: int = 10**6
    substeps: int = 8
    seed: int = 20240601
    antithetic: bool = False
    budget: int = DEFAULT_BUDGET
    workers: int = 1

    def __post_init__(self):
        if self.paths < 10**4:
            raise ValueError("paths must be >= 10^4")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if self.antithetic and self.paths % 2:
            raise ValueError("antithetic runs need an even path count")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def cost(self) -> int:
        return self.paths * (self.substeps + 1)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    config: McConfig

    def z_score(self, reference: float) -> float:
        return (self.mean - reference) / self.std_error


@dataclass(frozen=True)
class SubstepBias:
    coarse: float
    fine: float
    difference: float
    difference_se: float
    std_error: float


# stable substep weights --------------------------------------------------------

def _tanh_weight(k, h):
    """int over a substep of the bridge mean per unit (V_a + V_b - 2 level): tanh(k h / 2) / k."""
    x = k * h
    if abs(x) < 1e-3:
        return h / 2 * (1 - x * x / 12 + x**4 / 120)
    return math.tanh(x / 2) / k


def _bridge_var(k, h):
    """Variance of int U over [0, h] for an OU bridge with rate k and unit diffusion."""
    x = k * h
    if abs(x) < 0.1:
        return h**3 * (1 / 12 - x * x / 120 + 17 * x**4 / 20160)
    return (x - 2 * math.tanh(x / 2)) / k**3


def _sinh_ratios(x):
    """((sinh x cosh x - x) / sinh^2 x, (x cosh x - sinh x) / sinh^2 x, sinh x)."""
    s = math.sinh(x)
    if x < 0.5:
        num1 = num2 = den = 0.0
        for j in range(1, 12):
            num1 += (2 * x) ** (2 * j + 1) / (2 * math.factorial(2 * j + 1))
            num2 += x ** (2 * j + 1) * 2 * j / math.factorial(2 * j + 1)
            den += (2 * x) ** (2 * j) / (2 * math.factorial(2 * j))
        return num1 / den, num2 / den, s
    c = math.cosh(x)
    return (s * c - x) / (s * s), (x * c - s) / (s * s), s


# transitions -----------------------------------------------------------------

class _Sampler:
    """Exact transitions and substep integrals of one model."""

    needs_gamma = False
    channels = 1

    def draws(self, rng, m, k):
        return {}

    def start(self, m):
        return np.full(m, self.v0)


class _HestonSampler(_Sampler):
    def __init__(self, p: HestonParams):
        self.p = p
        self.v0 = p.v0
        self.k, self.th, self.g = p.kappa, p.theta, p.gamma
        self.rho = p.rho if p.gamma > 0 else 0.0
        self.df = 4 * self.k * self.th / self.g**2 if self.g > 0 else math.inf
        self.needs_gamma = self.g > 0 and self.df > 1

    def draws(self, rng, m, k):
        if not self.needs_gamma:
            return {}
        shape = (self.df - 1) / 2
        return {"gj": rng.standard_gamma(shape, m), "gs": rng.standard_gamma(shape, (m, k))}

    def step(self, v, h, z, gam, rng):
        k, th, g = self.k, self.th, self.g
        decay = np.exp(-k * h)
        if g == 0:
            return th + (v - th) * decay
        c = g * g * -np.expm1(-k * h) / (4 * k)
        lam = v * decay / c
        if self.df > 1:
            return c * ((z + np.sqrt(lam)) ** 2 + 2 * gam)
        n = rng.poisson(lam / 2)
        return c * 2 * rng.standard_gamma(self.df / 2 + n)

    def bridge(self, a, b, h):
        """Mean and variance of int V over a substep given both endpoints.

        Both follow from derivatives at zero of the conditional Laplace
        transform of the integrated CIR process; z below is the argument of
        the modified Bessel function in that transform.
        """
        k, g = self.k, self.g
        x = k * h / 2
        if x < 1e-3:
            # short steps: Brownian bridge of 2 sqrt(V) / gamma
            mean = self.th * h + (a + b - 2 * self.th) * _tanh_weight(k, h)
            mean = mean + g * g * h * h / 24 - h * (np.sqrt(b) - np.sqrt(a)) ** 2 / 6
            return mean, g * g * (a + b) / 2 * _bridge_var(k, h)
        nu = self.df / 2 - 1
        sh = math.sinh(x)
        coth = math.cosh(x) / sh
        z = 2 * k * np.sqrt(a * b) / (g * g * sh)
        safe = np.where(z > 0, z, 1.0)
        ratio = np.where(z > 0, special.ive(nu + 1, safe) / special.ive(nu, safe), 0.0)
        big_r = nu + z * ratio
        pk = (1 - x * coth) / k
        s = (a + b) / g**2
        fg = pk * (1 + big_r) - s * (coth - x / sh**2)
        dpk = (x * x / sh**2 - 1) / k**2
        dq = h * (x * coth - 1) / sh**2
        fgg = dpk * (1 + big_r) + pk * pk * (z * z + nu * nu - big_r * big_r) - s * dq
        mean = -(g * g / k) * fg
        var = g**4 / k**2 * fgg - g**4 / k**3 * fg
        return mean, np.maximum(var, 0.0)

    def log_return(self, grid, h, zb, G, r, delta):
        k, th, g = self.k, self.th, self.g
        a, b = grid[:, :-1], grid[:, 1:]
        if g > 0:
            mean, var = self.bridge(a, b, h)
            integral = (mean + np.sqrt(var) * zb[..., 0]).sum(axis=1)
        else:
            integral = (th * h + (a + b - 2 * th) * _tanh_weight(k, h)).sum(axis=1)
        x = r * delta - integral / 2 + math.sqrt(1 - self.rho**2) * np.sqrt(np.maximum(integral, 0)) * G
        if self.rho:
            x = x + self.rho * (grid[:, -1] - grid[:, 0] - k * th * delta + k * integral) / g
        return x

    def square_integral(self, grid, h):
        a, b = grid[:, :-1], grid[:, 1:]
        return (self.th * h + (a + b - 2 * self.th) * _tanh_weight(self.k, h)).sum(axis=1)


class _HullWhiteSampler(_Sampler):
    def __init__(self, p: HullWhiteParams):
        self.p = p
        self.v0 = p.v0
        self.mu, self.s = p.mu, p.sigma
        self.rho = p.rho if p.sigma > 0 else 0.0

    def step(self, v, h, z, gam, rng):
        return v * np.exp((self.mu - self.s**2 / 2) * h + self.s * np.sqrt(h) * z)

    def log_return(self, grid, h, zb, G, r, delta):
        mu, s = self.mu, self.s
        a, b = grid[:, :-1], grid[:, 1:]
        integral = ((a + b) * _tanh_weight(mu, h)).sum(axis=1)
        if s > 0:
            # log V bridge: curvature shift plus Gaussian spread
            vbar = (a + b) / 2
            log_step2 = np.log(b / a) ** 2
            x_noise = zb[..., 0] * math.sqrt(_bridge_var(-mu, h))
            integral = integral + (h * vbar / 12 * (s * s * h - log_step2) + s * vbar * x_noise).sum(axis=1)
        x = r * delta - integral / 2 + math.sqrt(1 - self.rho**2) * np.sqrt(np.maximum(integral, 0)) * G
        if self.rho:
            drift = mu / 2 - s * s / 8
            ra, rb = np.sqrt(a), np.sqrt(b)
            root_bar = np.sqrt(vbar)
            root_noise = zb[..., 0] * math.sqrt(_bridge_var(-drift, h)) * (s / 2) * root_bar
            root_shift = h * root_bar / 48 * (s * s * h - log_step2)
            root_int = ((ra + rb) * _tanh_weight(drift, h) + root_shift + root_noise).sum(axis=1)
            q = mu / s - s / 4
            x = x + self.rho * (2 * (rb[:, -1] - ra[:, 0]) / s - q * root_int)
        return x

    def square_integral(self, grid, h):
        a, b = grid[:, :-1], grid[:, 1:]
        return ((a + b) * _tanh_weight(self.mu, h)).sum(axis=1)


class _SchobelZhuSampler(_Sampler):
    channels = 2

    def __init__(self, p: SchobelZhuParams):
        self.p = p
        self.v0 = p.v0
        self.k, self.th, self.g = p.kappa, p.theta, p.gamma
        self.rho = p.rho if p.gamma > 0 else 0.0
        self._cov_cache = {}

    def step(self, v, h, z, gam, rng):
        k, th, g = self.k, self.th, self.g
        sd = g * np.sqrt(-np.expm1(-2 * k * h) / (2 * k))
        return th + (v - th) * np.exp(-k * h) + sd * z

    def _bridge_means(self, a, b, h):
        """E[int V | ends] and E[int V^2 | ends] over one substep."""
        k, th, g = self.k, self.th, self.g
        x = k * h
        w = _tanh_weight(k, h)
        g1, g2, s = _sinh_ratios(x)
        da, db = a - th, b - th
        first = th * h + (da + db) * w
        second = (
            th * th * h
            + 2 * th * (da + db) * w
            + (da * da + db * db) * g1 / (2 * k)
            + da * db * g2 / k
            + g * g * g2 * s / (2 * k * k)
        )
        return first, second

    def _bridge_cov(self, h):
        """Constants of the OU bridge U on [0, h]: M_ij = iint phi_i(s) phi_j(t) C(s, t), 2 iint C^2.

        The bridge mean is theta phi_0 + (V_a - theta) phi_1 + (V_b - theta) phi_2.
        """
        if h not in self._cov_cache:
            k, g = self.k, self.g
            xg, wg = np.polynomial.legendre.leggauss(40)
            xg, wg = (xg + 1) / 2, wg / 2
            t = h * xg[:, None] * np.ones_like(xg)[None, :]
            s = t * xg[None, :]
            weight = h * (wg * h * xg)[:, None] * wg[None, :]
            sh = math.sinh(k * h)
            cov = g * g * np.sinh(k * s) * np.sinh(k * (h - t)) / (k * sh)

            def phis(u):
                return [np.ones_like(u), np.sinh(k * (h - u)) / sh, np.sinh(k * u) / sh]

            ps, pt = phis(s), phis(t)
            m = np.empty((3, 3))
            for i in range(3):
                for j in range(3):
                    m[i, j] = np.sum(weight * cov * (ps[i] * pt[j] + pt[i] * ps[j]))
            self._cov_cache[h] = (m, 4 * np.sum(weight * cov * cov))
        return self._cov_cache[h]

    def log_return(self, grid, h, zb, G, r, delta):
        k, th, g = self.k, self.th, self.g
        a, b = grid[:, :-1], grid[:, 1:]
        first, second = self._bridge_means(a, b, h)
        if g > 0:
            # (int V, int V^2) given the ends: Gaussian part exact, int U^2 by its variance
            m, quartic = self._bridge_cov(h)
            u = (th, a - th, b - th)
            v11 = m[0, 0]
            v12 = 2 * (u[0] * m[0, 0] + u[1] * m[0, 1] + u[2] * m[0, 2])
            v22 = quartic + 4 * sum(m[i, j] * u[i] * u[j] for i in range(3) for j in range(3))
            lead = v12 / math.sqrt(v11)
            first = first + math.sqrt(v11) * zb[..., 0]
            second = second + lead * zb[..., 0] + np.sqrt(np.maximum(v22 - lead * lead, 0)) * zb[..., 1]
        i1, i2 = first.sum(axis=1), second.sum(axis=1)
        x = r * delta - i2 / 2 + math.sqrt(1 - self.rho**2) * np.sqrt(np.maximum(i2, 0)) * G
        if self.rho:
            df = (grid[:, -1] ** 2 - grid[:, 0] ** 2) / (2 * g)
            x = x + self.rho * (df - (k * th / g * i1 - k / g * i2 + g * delta / 2))
        return x

    def square_integral(self, grid, h):
        a, b = grid[:, :-1], grid[:, 1:]
        return self._bridge_means(a, b, h)[1].sum(axis=1)


def _sampler(params):
    if isinstance(params, HestonParams):
        return _HestonSampler(params)
    if isinstance(params, HullWhiteParams):
        return _HullWhiteSampler(params)
    if isinstance(params, SchobelZhuParams):
        return _SchobelZhuSampler(params)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


# block simulation ----------------------------------------------------------------

def _rng(seed, block):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _grid(sampler, start_time, m, k, h, z_jump, z_steps, draws, sign, rng):
    v = sampler.start(m)
    jump = start_time > 0
    if np.any(jump):
        moved = sampler.step(v, np.where(jump, start_time, 1.0), sign * z_jump, draws.get("gj"), rng)
        v = np.where(jump, moved, v)
    grid = np.empty((m, k + 1))
    grid[:, 0] = v
    gs = draws.get("gs")
    for j in range(k):
        v = sampler.step(v, h, sign * z_steps[:, j], None if gs is None else gs[:, j], rng)
        grid[:, j + 1] = v
    return grid


def _discrete_block(sampler, spec, cfg, block, first, count, substeps, fine=False):
    """Squared log returns of ``count`` path units starting at global unit index ``first``."""
    rng = _rng(cfg.seed, block)
    n, delta = spec.periods, spec.delta
    k = substeps * (2 if fine else 1)
    h = delta / k
    units = first + np.arange(count)
    interval = units % n
    start = interval * delta
    z_jump = rng.standard_normal(count)
    z_steps = rng.standard_normal((count, k))
    zb = rng.standard_normal((count, k, sampler.channels))
    G = rng.standard_normal(count)
    draws = sampler.draws(rng, count, k)
    signs = (1.0, -1.0) if cfg.antithetic else (1.0,)
    out = []
    for sign in signs:
        grid = _grid(sampler, start, count, k, h, z_jump, z_steps, draws, sign, rng)
        x = sampler.log_return(grid, h, sign * zb, sign * G, spec.rate, delta)
        if fine:
            # same path read at every other node, bridge noise merged pairwise
            coarse_zb = (zb[:, 0::2] + zb[:, 1::2]) / math.sqrt(2)
            xc = sampler.log_return(grid[:, ::2], 2 * h, sign * coarse_zb, sign * G, spec.rate, delta)
            out.append((x * x, xc * xc))
        else:
            out.append(x * x)
    if fine:
        return interval, [sum(o[0] for o in out) / len(out), sum(o[1] for o in out) / len(out)]
    return interval, sum(out) / len(out)


def _check_budget(cfg: McConfig, substeps: int):
    cost = cfg.paths * (substeps + 1)
    if cost > cfg.budget:
        raise BudgetExceeded(f"paths*(substeps+1) = {cost} exceeds budget {cfg.budget}")


def _blocks(units):
    per = BLOCK_PATHS
    return [(b, b * per, min(per, units - b * per)) for b in range(-(-units // per))]


def _run(fn, blocks, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda args: fn(*args), blocks))
    return [fn(*args) for args in blocks]


def _stratified(values_by_block, n, T):
    sums = np.zeros(n)
    sq = np.zeros(n)
    counts = np.zeros(n)
    for interval, y in values_by_block:
        sums += np.bincount(interval, weights=y, minlength=n)
        sq += np.bincount(interval, weights=y * y, minlength=n)
        counts += np.bincount(interval, minlength=n)
    means = sums / counts
    var = (sq - counts * means**2) / (counts - 1)
    return math.fsum(means) / T, math.sqrt(max(math.fsum(var / counts), 0.0)) / T


def _units(cfg: McConfig, spec: SwapSpec) -> int:
    units = cfg.paths // 2 if cfg.antithetic else cfg.paths
    if units < 2 * spec.periods:
        raise ValueError(f"need at least two path units per interval, got {units} for n = {spec.periods}")
    return units


def mc_discrete_strike(params, spec: SwapSpec, cfg: McConfig = McConfig()) -> McEstimate:
    """Stratified estimate of (1/T) sum_i E[(ln S_{i+1}/S_i)^2]."""
    _check_budget(cfg, cfg.substeps)
    sampler = _sampler(params)
    units = _units(cfg, spec)

    def block(b, first, count):
        return _discrete_block(sampler, spec, cfg, b, first, count, cfg.substeps)

    mean, se = _stratified(_run(block, _blocks(units), cfg.workers), spec.periods, spec.maturity)
    return McEstimate(mean, se, cfg)


def mc_substep_bias(params, spec: SwapSpec, cfg: McConfig = McConfig()) -> SubstepBias:
    """Paired estimates at ``substeps`` and twice that on the same simulated paths."""
    _check_budget(cfg, 2 * cfg.substeps)
    sampler = _sampler(params)
    units = _units(cfg, spec)

    def block(b, first, count):
        return _discrete_block(sampler, spec, cfg, b, first, count, cfg.substeps, fine=True)

    results = _run(block, _blocks(units), cfg.workers)
    n, T = spec.periods, spec.maturity
    fine = _stratified([(i, y[0]) for i, y in results], n, T)
    coarse = _stratified([(i, y[1]) for i, y in results], n, T)
    diff = _stratified([(i, y[0] - y[1]) for i, y in results], n, T)
    return SubstepBias(coarse[0], fine[0], diff[0], diff[1], fine[1])


def mc_continuous_strike(params, T: float, cfg: McConfig = McConfig()) -> McEstimate:
    """Estimate of (1/T) E[int_0^T m^2(V_s) ds] on a grid of ``substeps`` steps.

    The substep rule is exact in conditional mean, so the grid size only
    affects the variance of the estimate.
    """
    _check_budget(cfg, cfg.substeps)
    sampler = _sampler(params)
    k = cfg.substeps
    h = T / k
    units = cfg.paths // 2 if cfg.antithetic else cfg.paths

    def block(b, first, count):
        rng = _rng(cfg.seed, b)
        z = rng.standard_normal((count, k))
        draws = sampler.draws(rng, count, k)
        zero = np.zeros(count)
        vals = []
        for sign in (1.0, -1.0) if cfg.antithetic else (1.0,):
            grid = _grid(sampler, zero, count, k, h, zero, z, draws, sign, rng)
            vals.append(sampler.square_integral(grid, h) / T)
        return sum(vals) / len(vals)

    parts = _run(block, _blocks(units), cfg.workers)
    y = np.concatenate(parts)
    return McEstimate(float(np.mean(y)), float(np.std(y, ddof=1) / math.sqrt(y.size)), cfg)


# moment sampling for tests ----------------------------------------------------

def sample_pair(params, s: float, u: float, paths: int, seed: int = 0):
    """Exact joint draws of (V_s, V_u) for 0 < s <= u."""
    if not 0 < s <= u:
        raise DegenerateParameter("need 0 < s <= u")
    sampler = _sampler(params)
    rng = _rng(seed, 0)
    draws = sampler.draws(rng, paths, 1)
    z1, z2 = rng.standard_normal(paths), rng.standard_normal(paths)
    vs = sampler.step(sampler.start(paths), s, z1, draws.get("gj"), rng)
    gs = draws.get("gs")
    vu = sampler.step(vs, u - s, z2, None if gs is None else gs[:, 0], rng) if u > s else vs
    return vs, vu
