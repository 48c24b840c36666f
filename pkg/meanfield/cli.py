# meanfield/cli.py
import argparse
import json
import logging
import math
import sys
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from . import __version__, bubbles, export
from .config import Settings
from .errors import MeanFieldError, ParameterError
from .masses import mass_curve, mass_limits
from .params import (
    critical_lambda,
    critical_lambda_discrete,
    gamma_threshold,
    ordering_check,
    stochastic_critical_lambda,
)
from .parsers import parse_measure_file
from .plots import plot_det_curve, plot_lambda_curve, plot_masses
from .radial_solver import shoot
from .reductions import (
    ProfileBank,
    constraint_residuals,
    deterministic_curve,
    deterministic_existence_scan,
    find_deterministic_solution,
    lambda_curve,
    pohozaev_residual,
    threshold_bracket,
)
from .schemas import EIGHT_PI, RunConfig, SolutionRecord, SpeciesParams
from .utils import ensure_dir, parallel_map
from .verify import run_checks

logger = logging.getLogger("meanfield")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _mapper(settings: Settings):
    return lambda fn, items: parallel_map(fn, items, settings.workers)


def _params(run: RunConfig) -> SpeciesParams:
    if run.tau is None or run.gamma is None:
        raise ParameterError(f"{run.command} needs --tau and --gamma")
    return SpeciesParams(tau=run.tau, gamma=run.gamma)


def _alpha_grid(run: RunConfig, lo: float, hi: float, count: int) -> np.ndarray:
    return np.linspace(
        run.alpha_min if run.alpha_min is not None else lo,
        run.alpha_max if run.alpha_max is not None else hi,
        run.alpha_count if run.alpha_count is not None else count,
    )


def _lambdas(run: RunConfig, params: SpeciesParams, default_ratios: List[float]) -> List[float]:
    """Explicit --lambda values plus --ratio multiples of the critical constant."""
    ratios = list(run.ratios) or ([] if run.lambdas else default_ratios)
    bar = critical_lambda(params).value
    return list(run.lambdas) + [r * bar for r in ratios]


# -----------------------------
# mt-constant
# -----------------------------
def cmd_mt_constant(run: RunConfig, settings: Settings, args) -> int:
    if run.measure_path:
        measure = parse_measure_file(run.measure_path)
        mt = critical_lambda_discrete(measure)
        print(f"critical lambda = {mt.value!r} ({mt.value / math.pi:.12g} π) branch={mt.branch} subset={list(mt.subset)}")
        if measure.is_dirac_one:
            print("measure is δ₁: standard mean field problem")
    else:
        params = _params(run)
        mt = critical_lambda(params)
        print(f"critical lambda = {mt.value!r} ({mt.value / math.pi:.12g} π) branch={mt.branch}")
        if not params.is_standard:
            print(f"gamma threshold = {gamma_threshold(params.tau)!r} "
                  f"ordering tau/(1+tau) < threshold < 1/2: {ordering_check(params.tau)}")
    print(f"stochastic critical lambda = {stochastic_critical_lambda()!r}")
    return EXIT_OK


# -----------------------------
# shoot / masses
# -----------------------------
def cmd_shoot(run: RunConfig, settings: Settings, args) -> int:
    if run.alpha is None or run.gamma is None:
        raise ParameterError("shoot needs --alpha and --gamma")
    profile = shoot(run.alpha, run.gamma, a=args.a, b=args.b, settings=settings)
    out = ensure_dir(run.out_dir) / f"profile_alpha{run.alpha:g}_gamma{run.gamma:g}.txt"
    export.write_profile(profile, out, export.run_header(run.model_dump(), settings))
    d = profile.diagnostics
    print(f"beta = {profile.beta_estimate!r} far_radius = {d.far_radius:.6g} nodes = {len(profile.nodes)}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_masses(run: RunConfig, settings: Settings, args) -> int:
    if run.gamma is None:
        raise ParameterError("masses needs --gamma")
    grid = [run.alpha] if run.alpha is not None else _alpha_grid(run, -30.0, 30.0, 13)
    reports = mass_curve(run.gamma, grid, settings, mapper=_mapper(settings))
    out = ensure_dir(run.out_dir)
    path = export.write_table(export.mass_frame(reports), out / "masses.csv",
                              export.run_header(run.model_dump(), settings), sort_by=["gamma", "alpha"])
    refused = sum(r.tail_refused for r in reports)
    print(f"{len(reports)} mass reports, {refused} with refused tails; wrote {path}")
    if run.svg:
        print(f"wrote {plot_masses(reports, mass_limits(run.gamma), out / 'masses.svg')}")
    return EXIT_OK


# -----------------------------
# stochastic curve
# -----------------------------
def cmd_curve(run: RunConfig, settings: Settings, args) -> int:
    params = _params(run)
    grid = None
    if run.alpha_min is not None or run.alpha_max is not None or run.alpha_count is not None:
        if run.alpha_min is None or run.alpha_max is None:
            raise ParameterError("curve needs both --alpha-min and --alpha-max for an explicit grid")
        grid = _alpha_grid(run, run.alpha_min, run.alpha_max, settings.curve_points)
    curve = lambda_curve(params, grid, settings, mapper=_mapper(settings))
    out = ensure_dir(run.out_dir)
    path = export.write_table(export.curve_frame(curve), out / "lambda_curve.csv",
                              export.run_header(run.model_dump(), settings), sort_by=["alpha"])
    sup = curve.supremum
    if sup is None:
        print("no curve points")
        return EXIT_FAIL
    verdict = "YES" if sup.lambda_value > EIGHT_PI else "NO"
    print(f"sup Λ = {sup.lambda_value!r} at alpha = {sup.alpha!r} > 8π: {verdict}")
    if curve.failures:
        print(f"{len(curve.failures)} points failed: " + ", ".join(sorted({f['error'] for f in curve.failures})))
    print(f"wrote {path}")
    if run.svg:
        print(f"wrote {plot_lambda_curve(curve, out / 'lambda_curve.svg')}")
    return EXIT_OK


# -----------------------------
# deterministic problem
# -----------------------------
def cmd_det_solve(run: RunConfig, settings: Settings, args) -> int:
    params = _params(run)
    lambdas = _lambdas(run, params, [])
    if len(lambdas) != 1:
        raise ParameterError("det-solve needs exactly one --lambda or --ratio")
    result = find_deterministic_solution(params, lambdas[0], settings=settings)
    if not isinstance(result, SolutionRecord):
        print(f"not found: {result.reason}; alpha range {list(result.alpha_range)}")
        if result.sign_pattern:
            print(f"h sign pattern: {result.sign_pattern} min |h| = {result.min_abs_h!r}")
        return EXIT_OK
    r1, r2 = constraint_residuals(result, settings)
    out = ensure_dir(run.out_dir) / "det_solution.txt"
    export.write_record(result, out, export.run_header(run.model_dump(), settings))
    print(f"found alpha = {result.alpha!r} R = {result.radius!r} v(0) = {result.v_center!r}")
    print(f"constraint residuals = {r1:.3e}, {r2:.3e} pohozaev = {pohozaev_residual(result, settings):.3e}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_det_scan(run: RunConfig, settings: Settings, args) -> int:
    params = _params(run)
    lambdas = _lambdas(run, params, [0.5, 0.9, 0.99, 1.0, 1.05])
    bank = None if params.is_standard else ProfileBank(params.gamma, settings=settings)
    rows = deterministic_existence_scan(params, lambdas, settings, bank)
    out = ensure_dir(run.out_dir)
    header = export.run_header(run.model_dump(), settings)
    path = export.write_table(export.existence_frame(rows), out / "existence.csv", header, sort_by=["lambda"])
    for r in rows:
        print(f"lambda = {r.lambda_value:.12g} (x{r.ratio:.4g}) {'found' if r.found else 'not found'}")
    bracket = threshold_bracket(rows)
    if bracket:
        print(f"threshold in ({bracket[0]!r}, {bracket[1]!r}); critical lambda = {critical_lambda(params).value!r}")
    else:
        print("no single found/not-found flip in this grid")
    print(f"wrote {path}")
    if run.svg and bank is not None:
        seeds = np.linspace(settings.alpha_scan_min, settings.alpha_scan_max, settings.alpha_scan_points)
        points = deterministic_curve(params, seeds, settings, bank)
        export.write_table(export.det_curve_frame(points, params.tau, params.gamma), out / "det_curve.csv",
                           header, sort_by=["alpha"])
        print(f"wrote {plot_det_curve(points, critical_lambda(params).value, out / 'det_curve.svg')}")
    return EXIT_OK


# -----------------------------
# bubbles
# -----------------------------
def cmd_bubble_check(run: RunConfig, settings: Settings, args) -> int:
    params = _params(run)
    for delta in (1.0, 0.1, 0.01):
        closed, quad = bubbles.gradient_energy(delta), bubbles.gradient_energy_quadrature(delta)
        print(f"delta={delta:g} gradient energy {closed!r} quadrature rel diff {abs(closed / quad - 1):.2e}")
        for a in (0.25, 0.5, 0.75, 1.0):
            closed, quad = bubbles.exp_integral(delta, a), bubbles.exp_integral_quadrature(delta, a)
            print(f"delta={delta:g} a={a:g} exp integral {closed!r} rel diff {abs(closed / quad - 1):.2e}")

    lambdas = _lambdas(run, params, [1.05])
    deltas = list(run.deltas) or bubbles.geometric_deltas(5, 12)
    out = ensure_dir(run.out_dir)
    header = export.run_header(run.model_dump(), settings)
    for lam in lambdas:
        series = bubbles.blowdown_series(params, lam, deltas, settings)
        stem = f"blowdown_lambda{lam:.6g}"
        export.write_table(export.blowdown_frame(series), out / f"{stem}.csv", header, sort_by=["delta"])
        export.write_json({**export.blowdown_summary(series), **header}, out / f"{stem}.json")
        print(f"lambda={lam:.10g} case={series.t_gamma.case} t={series.t_gamma.value:.12g} "
              f"slope={series.fitted_slope:.8g} predicted={series.predicted_slope:.8g}")
    return EXIT_OK


# -----------------------------
# verify
# -----------------------------
def cmd_verify(run: RunConfig, settings: Settings, args) -> int:
    results = run_checks(run.filters, settings)
    width = max(len(r.name) for r in results)
    for r in results:
        residual = "" if r.residual is None else f"{r.residual:.3e}"
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {residual:>10}  {r.detail}")
    out = ensure_dir(run.out_dir)
    export.write_table(pd.DataFrame([r.model_dump() for r in results]), out / "verify.csv",
                       export.run_header(run.model_dump(), settings), sort_by=["name"])
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed: {', '.join(failed)}")
        return EXIT_FAIL
    return EXIT_OK


COMMANDS = {
    "mt-constant": cmd_mt_constant,
    "shoot": cmd_shoot,
    "masses": cmd_masses,
    "curve": cmd_curve,
    "det-solve": cmd_det_solve,
    "det-scan": cmd_det_scan,
    "bubble-check": cmd_bubble_check,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--svg", action="store_true", help="also write SVG plots")
    common.add_argument("--rel-tol", type=float, help="integrator relative tolerance")
    common.add_argument("--seed", type=int, help="seed for collocation radii and random samples")
    common.add_argument("--workers", type=int, help="process pool size (default: all cores)")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("-q", "--quiet", action="store_true")

    tau = argparse.ArgumentParser(add_help=False)
    tau.add_argument("--tau", type=float)
    gamma = argparse.ArgumentParser(add_help=False)
    gamma.add_argument("--gamma", type=float)
    species = [tau, gamma]

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--alpha", type=float)
    grid.add_argument("--alpha-min", type=float)
    grid.add_argument("--alpha-max", type=float)
    grid.add_argument("--alpha-count", type=int)

    lam = argparse.ArgumentParser(add_help=False)
    lam.add_argument("--lambda", dest="lambdas", type=float, nargs="+", default=[])
    lam.add_argument("--ratio", type=float, nargs="+", help="lambda as multiples of the critical constant")

    ap = argparse.ArgumentParser(prog="meanfield", description="Two-species mean field equations on the unit disc")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    mt = sub.add_parser("mt-constant", parents=[common, *species], help="critical constant")
    mt.add_argument("--measure", help="file of 'weight intensity' pairs")
    sh = sub.add_parser("shoot", parents=[common, gamma, grid], help="integrate one radial profile")
    sh.add_argument("--a", type=float, default=1.0)
    sh.add_argument("--b", type=float, default=1.0)
    sub.add_parser("masses", parents=[common, gamma, grid], help="mass sweep over alpha")
    sub.add_parser("curve", parents=[common, *species, grid], help="stochastic Λ-curve")
    sub.add_parser("det-solve", parents=[common, *species, lam], help="one deterministic solution")
    sub.add_parser("det-scan", parents=[common, *species, lam], help="deterministic existence table")
    bc = sub.add_parser("bubble-check", parents=[common, *species, lam], help="bubble closed forms and blow-down")
    bc.add_argument("--delta", dest="deltas", type=float, nargs="+", default=[])
    vf = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    vf.add_argument("--filter", dest="filters", action="append", default=[])
    return ap


def _run_config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        tau=getattr(args, "tau", None),
        gamma=getattr(args, "gamma", None),
        measure_path=getattr(args, "measure", None),
        alpha=getattr(args, "alpha", None),
        alpha_min=getattr(args, "alpha_min", None),
        alpha_max=getattr(args, "alpha_max", None),
        alpha_count=getattr(args, "alpha_count", None),
        lambdas=tuple(getattr(args, "lambdas", ())),
        ratios=tuple(getattr(args, "ratio", None) or ()),
        deltas=tuple(getattr(args, "deltas", ())),
        rel_tol=args.rel_tol,
        out_dir=args.out,
        svg=args.svg,
        workers=args.workers,
        seed=args.seed,
        filters=tuple(getattr(args, "filters", ())),
    )


def _settings(run: RunConfig) -> Settings:
    overrides = {k: v for k, v in (("rel_tol", run.rel_tol), ("seed", run.seed), ("workers", run.workers)) if v is not None}
    return Settings(**overrides)


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        run = _run_config(args)
        settings = _settings(run)
        logger.info("meanfield %s command=%s out=%s workers=%s", __version__, run.command, run.out_dir, settings.workers)
        return COMMANDS[run.command](run, settings, args)
    except (ParameterError, ValidationError) as e:
        detail = e.to_dict() if isinstance(e, ParameterError) else {"errors": [err["msg"] for err in e.errors()]}
        print(f"usage error: {json.dumps(detail, default=str)}", file=sys.stderr)
        return EXIT_USAGE
    except MeanFieldError as e:
        print(f"error: {json.dumps(e.to_dict(), default=str)}", file=sys.stderr)
        return EXIT_FAIL
