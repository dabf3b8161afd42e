"""Command-line driver.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 failed check.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import replace

import numpy as np

from . import heston, hullwhite
from .asymptotics import expansion_n, expansion_report
from .errors import BudgetExceeded, NumericalError, ValidationError
from .framework import generic_discrete_strike
from .montecarlo import McConfig, mc_discrete_strike
from .params import HestonParams, HullWhiteParams, SwapSpec, dump_params, load_params, validate
from .pricing import continuous_strike, discrete_strike, model_kernels

log = logging.getLogger("varswap")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4
QUADRATURE_RTOL = 1e-6
MC_Z_LIMIT = 3.0
SWEEP_VARIABLES = ("n", "rho", "T", "gamma", "sigma", "r")
CSV_HEADER = ("x", "K_d", "K_c", "gap", "a1_prediction")


def fmt(x) -> str:
    """Fixed 12 significant digits, independent of locale."""
    return "" if x is None else f"{x:.12g}"


# input resolution ------------------------------------------------------------

def _resolve(args, default_n=1):
    params, file_spec = load_params(args.model)
    T = args.T if args.T is not None else (file_spec.maturity if file_spec else 1.0)
    n = args.n if args.n is not None else (file_spec.periods if file_spec else default_n)
    r = args.r if args.r is not None else (file_spec.rate if file_spec else 0.0)
    spec = SwapSpec(T, n, r)
    _validated(params, spec)
    log.info("resolved parameters: %s", json.dumps(json.loads(dump_params(params, spec)), sort_keys=True))
    return params, spec


def _validated(params, spec):
    report = validate(params, spec)
    report.raise_for_violations()
    for w in report.warnings:
        log.warning(w)


def _a1(params, spec):
    try:
        return expansion_n(params, spec.maturity, spec.rate).a1
    except NumericalError:
        return None


# subcommands ---------------------------------------------------------------

def cmd_price(args) -> int:
    params, spec = _resolve(args)
    kd = discrete_strike(params, spec)
    kc = continuous_strike(params, spec.maturity)
    print(f"model = {params.model}")
    print(f"T = {fmt(spec.maturity)}, n = {spec.periods}, r = {fmt(spec.rate)}")
    print(f"K_d = {fmt(kd)}")
    print(f"K_c = {fmt(kc)}")
    print(f"gap = {fmt(kd - kc)}")
    print(f"r* = {fmt(kc / 2)}")
    if args.simple_returns:
        if not isinstance(params, HestonParams):
            raise ValidationError(["--simple-returns is only available for the Heston model"])
        print(f"K_simple x 1e4 = {heston.simple_return_strike_bp(params, spec):.1f}")
    return EXIT_OK


def _sweep_values(args):
    if args.count < 2:
        raise ValidationError(["--count must be >= 2"])
    if args.spacing == "log":
        if args.start <= 0 or args.stop <= 0:
            raise ValidationError(["log spacing needs positive start and stop"])
        xs = np.geomspace(args.start, args.stop, args.count)
    else:
        xs = np.linspace(args.start, args.stop, args.count)
    if args.var == "n":
        out = []
        for x in np.rint(xs).astype(int):
            if x not in out:
                out.append(int(x))
        return out
    return [float(x) for x in xs]


def _apply(params, spec, var, x):
    if var == "n":
        return params, replace(spec, periods=x)
    if var == "T":
        return params, replace(spec, maturity=x)
    if var == "r":
        return params, replace(spec, rate=x)
    if var == "rho":
        return replace(params, rho=x), spec
    if var == "gamma":
        if isinstance(params, HullWhiteParams):
            raise ValidationError(["gamma sweeps need a Heston or Schobel-Zhu model; use sigma for Hull-White"])
        return replace(params, gamma=x), spec
    if not isinstance(params, HullWhiteParams):
        raise ValidationError(["sigma sweeps need a Hull-White model"])
    return replace(params, sigma=x), spec


def sweep_rows(params, spec, var, values):
    rows = []
    for x in values:
        p, s = _apply(params, spec, var, x)
        _validated(p, s)
        kd = discrete_strike(p, s)
        kc = continuous_strike(p, s.maturity)
        a1 = _a1(p, s)
        rows.append((x, kd, kc, kd - kc, None if a1 is None else a1 / s.periods))
    return rows


def write_csv(rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for x, *rest in rows:
        writer.writerow([str(x) if isinstance(x, int) else fmt(x), *map(fmt, rest)])


def cmd_sweep(args) -> int:
    params, spec = _resolve(args)
    log.info("sweep %s from %s to %s, %d points, %s spacing", args.var, args.start, args.stop, args.count, args.spacing)
    rows = sweep_rows(params, spec, args.var, _sweep_values(args))
    if args.out:
        with open(args.out, "w", newline="", encoding="ascii") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_match(args) -> int:
    params, spec = _resolve(args)
    if not isinstance(params, HestonParams):
        raise ValidationError(["match needs a Heston parameter file"])
    start = time.perf_counter()
    hw = hullwhite.match_params(params, spec.maturity)
    log.info("matched in %.3f s", time.perf_counter() - start)
    print(f"mu = {fmt(hw.mu)}")
    print(f"sigma = {fmt(hw.sigma)}")
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(dump_params(hw, spec) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    params, spec = _resolve(args)
    cfg = McConfig(paths=args.mc_paths, substeps=args.mc_substeps, seed=args.seed)
    closed = discrete_strike(params, spec)
    quad = generic_discrete_strike(model_kernels(params), spec).value
    rel = abs(quad - closed) / abs(closed)
    mc = mc_discrete_strike(params, spec, cfg)
    z = mc.z_score(closed)
    quad_ok = rel <= QUADRATURE_RTOL
    mc_ok = abs(z) <= MC_Z_LIMIT
    print(f"closed form = {fmt(closed)}")
    print(f"quadrature  = {fmt(quad)}  rel.diff = {rel:.3e}  {'PASS' if quad_ok else 'FAIL'}")
    print(f"monte carlo = {fmt(mc.mean)} +/- {fmt(mc.std_error)}  z = {z:+.2f}  {'PASS' if mc_ok else 'FAIL'}")
    ok = quad_ok and mc_ok
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_expand(args) -> int:
    params, spec = _resolve(args)
    report = expansion_report(params, spec).as_dict()
    clean = {k: float(v) if isinstance(v, (float, np.floating)) else v for k, v in report.items()}
    print(json.dumps(clean, indent=2))
    return EXIT_OK


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varswap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", required=True, help="JSON parameter file")
        p.add_argument("--n", type=int, help="number of sampling periods")
        p.add_argument("--T", type=float, help="maturity in years")
        p.add_argument("--r", type=float, help="continuously compounded rate")
        return p

    price = common(sub.add_parser("price", help="discrete and continuous strikes"))
    price.add_argument("--simple-returns", action="store_true", help="also price squared simple returns (Heston)")
    price.set_defaults(func=cmd_price)

    sweep = common(sub.add_parser("sweep", help="CSV of strikes over one variable"))
    sweep.add_argument("--var", required=True, choices=SWEEP_VARIABLES)
    sweep.add_argument("--start", type=float, required=True)
    sweep.add_argument("--stop", type=float, required=True)
    sweep.add_argument("--count", type=int, required=True)
    sweep.add_argument("--spacing", choices=("linear", "log"), default="linear")
    sweep.add_argument("--out", help="CSV path, stdout if omitted")
    sweep.set_defaults(func=cmd_sweep)

    match = common(sub.add_parser("match", help="Hull-White parameters matching a Heston model"))
    match.add_argument("--out", help="write the matched parameter file here")
    match.set_defaults(func=cmd_match)

    check = common(sub.add_parser("check", help="closed form against quadrature and Monte Carlo"))
    check.add_argument("--mc-paths", type=int, default=McConfig.paths)
    check.add_argument("--mc-substeps", type=int, default=McConfig.substeps)
    check.add_argument("--seed", type=int, default=McConfig.seed)
    check.set_defaults(func=cmd_check)

    expand = common(sub.add_parser("expand", help="large-n and small-T expansion coefficients"))
    expand.set_defaults(func=cmd_expand)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except (ValidationError, BudgetExceeded, OSError, ValueError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
