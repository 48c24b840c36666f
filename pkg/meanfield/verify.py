# meanfield/verify.py
"""Named acceptance checks. Each returns a CheckResult; `run_checks` runs a filtered subset."""
import logging
import math
import tempfile
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import bubbles
from .config import Settings, get_settings
from .errors import InfeasibleError, MeanFieldError, ParameterError
from .export import mass_frame, run_header, write_table
from .masses import compute_masses, energy_identity_residual, flux_residual, mass_curve, mass_limits, masses_at
from .params import beta_boundary, critical_lambda_discrete, critical_lambda_two_species, gamma_threshold
from .radial_solver import fd_residual, shoot
from .reductions import (
    ProfileBank,
    build_stochastic_solution,
    constraint_residuals,
    curve_point,
    find_deterministic_solution,
    functional_det,
    functional_standard,
    functional_stoch,
    lambda_curve,
    lambda_of_alpha,
    pde_residual,
    pohozaev_residual,
    sigma_of_alpha,
    zero_function,
)
from .schemas import EIGHT_PI, CheckResult, LambdaCurvePoint, MassReport, SolutionRecord, SpeciesParams
from .utils import collocation_radii, file_md5, parallel_map

logger = logging.getLogger(__name__)

ORACLE_ABS_TOL = 1e-8
ORACLE_MASS_TOL = 1e-6
LIMIT_FRACTION = 0.10
GRID_GAMMAS = (0.3, 0.5, 0.7)
GRID_ALPHAS = (-20.0, -10.0, -5.0, 0.0, 5.0, 10.0, 20.0)
DET_CASES = ((0.5, 0.25), (0.5, 0.8))
DET_FOUND = (0.5, 0.9, 0.99)
DET_MISSING = (1.0, 1.05)
COLLOCATION_POINTS = 100
ODE_RADII = (1e-3, 50.0)
ODE_POINTS = 200
CONTINUITY_OFFSETS = (2.0, 12.0)
CONTINUITY_POINTS = 100
CONTINUITY_JUMP = 0.05
FUNCTIONAL_TOL = 1e-10
DETERMINISM_ALPHAS = (-5.0, 0.0, 5.0)


class Context:
    """Shared state across checks so profiles and records are computed once."""

    def __init__(self, settings: Settings):
        self.settings = settings
        self._reports: Dict[Tuple[float, float], MassReport] = {}
        self.det_records: List[SolutionRecord] = []
        self.det_failures: Optional[List[str]] = None

    def report(self, gamma: float, alpha: float) -> MassReport:
        key = (gamma, alpha)
        if key not in self._reports:
            self._reports[key] = masses_at(alpha, gamma, self.settings)
        return self._reports[key]

    def mapper(self):
        s = self.settings
        return lambda fn, items: parallel_map(fn, items, s.workers)


def _result(name: str, failures: List[str], residual: Optional[float], detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=not failures, residual=residual,
                       detail="; ".join(failures) if failures else detail)


# -----------------------------
# radial solver and masses
# -----------------------------
def check_integrator_oracle(ctx: Context) -> CheckResult:
    profile = shoot(math.log(8.0), 0.5, a=1.0, b=0.0, settings=ctx.settings)
    r = np.linspace(0.0, 50.0, 2001)
    err = float(np.max(np.abs(profile.nodes.value(r) - (math.log(8.0) - 2.0 * np.log1p(r * r)))))
    mass_err = abs(compute_masses(profile, ctx.settings).m1 - EIGHT_PI) / EIGHT_PI
    failures = []
    if err > ORACLE_ABS_TOL:
        failures.append(f"max abs error {err:.3e}")
    if mass_err > ORACLE_MASS_TOL:
        failures.append(f"mass rel error {mass_err:.3e}")
    return _result("integrator-oracle", failures, max(err, mass_err), f"abs={err:.3e} mass={mass_err:.3e}")


def check_energy_identity(ctx: Context) -> CheckResult:
    worst, failures = 0.0, []
    for g in GRID_GAMMAS:
        for a in GRID_ALPHAS:
            res = energy_identity_residual(ctx.report(g, a))
            worst = max(worst, res)
            if res > ctx.settings.energy_tol:
                failures.append(f"gamma={g} alpha={a} residual={res:.3e}")
    return _result("energy-identity", failures, worst)


def check_flux_identity(ctx: Context) -> CheckResult:
    worst, failures = 0.0, []
    for g in GRID_GAMMAS:
        for a in GRID_ALPHAS:
            res = flux_residual(ctx.report(g, a))
            worst = max(worst, res)
            if res > ctx.settings.flux_tol:
                failures.append(f"gamma={g} alpha={a} residual={res:.3e}")
    return _result("flux-identity", failures, worst)


def check_mass_bounds(ctx: Context) -> CheckResult:
    failures = []
    alphas = np.arange(-30.0, 30.0 + 1e-9, 5.0)
    worst = 0.0
    for g in GRID_GAMMAS:
        plus, minus = mass_limits(g)
        reports = [ctx.report(g, float(a)) for a in alphas]
        totals = np.array([r.total for r in reports])
        for r in reports:
            if not r.m1 < EIGHT_PI:
                failures.append(f"gamma={g} alpha={r.alpha}: m1={r.m1:.12g} >= 8π")
            if not plus < r.total < minus:
                failures.append(f"gamma={g} alpha={r.alpha}: total={r.total:.12g} outside ({plus:.6g}, {minus:.6g})")
        if not np.all(np.diff(totals) < 0):
            failures.append(f"gamma={g}: total mass not strictly decreasing")
        low = abs(totals[0] - minus) / minus
        high = abs(totals[-1] - plus) / plus
        worst = max(worst, low, high)
        if low > LIMIT_FRACTION:
            failures.append(f"gamma={g}: alpha=-30 total off the limit by {low:.2%}")
        if high > LIMIT_FRACTION:
            failures.append(f"gamma={g}: alpha=30 total off the limit by {high:.2%}")
    return _result("mass-bounds", failures, worst)


# -----------------------------
# stochastic curve
# -----------------------------
def check_stochastic_curve(ctx: Context) -> CheckResult:
    failures, worst = [], 0.0
    for tau in GRID_GAMMAS:
        for g in GRID_GAMMAS:
            params = SpeciesParams(tau=tau, gamma=g)
            start = curve_point(beta_boundary(params) + 1e-3, params, ctx.settings)
            far = curve_point(30.0, params, ctx.settings)
            for p in (start, far):
                if not isinstance(p, LambdaCurvePoint):
                    failures.append(f"tau={tau} gamma={g}: {p.get('message')}")
            if failures:
                continue
            worst = max(worst, abs(far.lambda_value - EIGHT_PI))
            if start.lambda_value > 0.1:
                failures.append(f"tau={tau} gamma={g}: Lambda(beta+1e-3)={start.lambda_value:.4g}")
            if abs(far.lambda_value - EIGHT_PI) > 0.5:
                failures.append(f"tau={tau} gamma={g}: Lambda(30)={far.lambda_value:.6g}")
    return _result("stochastic-curve", failures, worst)


def check_lambda_star(ctx: Context) -> CheckResult:
    params = SpeciesParams(tau=1e-3, gamma=0.5)
    curve = lambda_curve(params, settings=ctx.settings, mapper=ctx.mapper())
    sup = curve.supremum
    if sup is None:
        return _result("lambda-star", ["no curve points"], None)
    failures = [] if sup.lambda_value >= 9.0 * math.pi else [f"sup Lambda={sup.lambda_value:.6g} < 9π"]
    return _result("lambda-star", failures, sup.lambda_value,
                   f"sup Lambda={sup.lambda_value:.8g} at alpha={sup.alpha:.6g}")


def check_tau_monotonicity(ctx: Context) -> CheckResult:
    alpha = 5.0
    profile = shoot(alpha, 0.5, settings=ctx.settings)
    sig, lam = [], []
    for tau in (0.1, 0.2, 0.4):
        params = SpeciesParams(tau=tau, gamma=0.5)
        s = sigma_of_alpha(profile, params, settings=ctx.settings)
        sig.append(s)
        lam.append(lambda_of_alpha(profile, params, s, ctx.settings))
    failures = []
    if not np.all(np.diff(sig) < 0):
        failures.append(f"sigma not decreasing in tau: {sig}")
    if not np.all(np.diff(lam) < 0):
        failures.append(f"Lambda not decreasing in tau: {lam}")
    return _result("tau-monotonicity", failures, None, f"sigma={sig} Lambda={lam}")


# -----------------------------
# deterministic problem
# -----------------------------
def _det_records(ctx: Context) -> List[str]:
    if ctx.det_failures is not None:
        return ctx.det_failures
    failures = []
    for tau, g in DET_CASES:
        params = SpeciesParams(tau=tau, gamma=g)
        bar = critical_lambda_two_species(params).value
        bank = ProfileBank(g, settings=ctx.settings)
        for ratio in DET_FOUND + DET_MISSING:
            lam = ratio * bar
            result = find_deterministic_solution(params, lam, bank, ctx.settings)
            found = isinstance(result, SolutionRecord)
            if ratio in DET_FOUND and not found:
                failures.append(f"tau={tau} gamma={g} ratio={ratio}: not found ({result.reason})")
            if ratio in DET_MISSING and found:
                failures.append(f"tau={tau} gamma={g} ratio={ratio}: unexpected solution at alpha={result.alpha:.6g}")
            if found and ratio in DET_FOUND:
                r1, r2 = constraint_residuals(result, ctx.settings)
                if max(r1, r2) > ctx.settings.constraint_tol:
                    failures.append(f"tau={tau} gamma={g} ratio={ratio}: constraint residuals {r1:.2e}, {r2:.2e}")
                ctx.det_records.append(result)
    ctx.det_failures = failures
    return failures


def check_det_threshold(ctx: Context) -> CheckResult:
    failures = _det_records(ctx)
    return _result("det-threshold", failures, None, f"{len(ctx.det_records)} solutions")


def check_pohozaev_collocation(ctx: Context) -> CheckResult:
    _det_records(ctx)
    s = ctx.settings
    radii = collocation_radii(s.seed, COLLOCATION_POINTS)
    failures, worst = [], 0.0
    for rec in ctx.det_records:
        poh = pohozaev_residual(rec, s)
        col = pde_residual(rec, radii, s)
        worst = max(worst, poh)
        if poh > s.pohozaev_tol:
            failures.append(f"det lambda={rec.lambda_value:.6g}: pohozaev {poh:.3e}")
        if col > s.collocation_tol:
            failures.append(f"det lambda={rec.lambda_value:.6g}: collocation {col:.3e}")
    for tau, g, alpha in ((0.5, 0.5, 5.0), (0.3, 0.7, 10.0)):
        rec = build_stochastic_solution(SpeciesParams(tau=tau, gamma=g), alpha, settings=s)
        col = pde_residual(rec, radii, s)
        if col > s.collocation_tol:
            failures.append(f"stoch tau={tau} gamma={g} alpha={alpha}: collocation {col:.3e}")
    return _result("pohozaev-collocation", failures, worst)


# -----------------------------
# bubbles and constants
# -----------------------------
def check_bubble_closed_forms(ctx: Context) -> CheckResult:
    tol = ctx.settings.closed_form_tol
    failures, worst = [], 0.0
    for delta in (1.0, 0.1, 0.01):
        rel = abs(bubbles.gradient_energy(delta) / bubbles.gradient_energy_quadrature(delta) - 1.0)
        worst = max(worst, rel)
        if rel > tol:
            failures.append(f"gradient delta={delta}: {rel:.3e}")
        for a in (0.25, 0.5, 0.75, 1.0):
            rel = abs(bubbles.exp_integral(delta, a) / bubbles.exp_integral_quadrature(delta, a) - 1.0)
            worst = max(worst, rel)
            if rel > tol:
                failures.append(f"exp integral delta={delta} a={a}: {rel:.3e}")

    tiny = 2.0 ** -20
    ratio = bubbles.log_exp_integral(tiny, 1.0) / math.log(1.0 / tiny ** 2)
    if abs(ratio - 1.0) > 0.05:
        failures.append(f"a=1 regime ratio {ratio:.4f}")
    half = bubbles.exp_integral(tiny, 0.5) / (math.pi * math.log(1.0 / tiny ** 2))
    if abs(half - 1.0) > 1e-6:
        failures.append(f"a=1/2 regime ratio {half:.8f}")
    quarter = bubbles.exp_integral(1e-2, 0.25) / bubbles.exp_integral(1e-4, 0.25)
    if abs(quarter - 1.0) >= 0.01:
        failures.append(f"a=1/4 regime variation {quarter - 1.0:.4f}")
    lap = float(np.max(bubbles.pu_laplacian_residual(0.1, np.linspace(0.02, 1.0, 50))))
    if lap > 1e-8:
        failures.append(f"laplacian residual {lap:.3e}")
    return _result("bubble-closed-forms", failures, worst)


def check_blowdown(ctx: Context) -> CheckResult:
    failures, worst = [], 0.0
    deltas = bubbles.geometric_deltas(5, 12)
    for tau, g in DET_CASES:
        params = SpeciesParams(tau=tau, gamma=g)
        bar = critical_lambda_two_species(params).value
        series = bubbles.blowdown_series(params, 1.05 * bar, deltas, ctx.settings)
        if not np.all(np.diff(series.values) < 0):
            failures.append(f"tau={tau} gamma={g}: values not strictly decreasing")
        rel = abs(series.fitted_slope - series.predicted_slope) / abs(series.predicted_slope)
        worst = max(worst, rel)
        if rel > ctx.settings.slope_tol:
            failures.append(f"tau={tau} gamma={g}: slope {series.fitted_slope:.6g} vs {series.predicted_slope:.6g}")

    for tau in (0.25, 0.5, 0.75):
        for g in (0.2, 0.4, 0.6, 0.8):
            params = SpeciesParams(tau=tau, gamma=g)
            bar = critical_lambda_two_species(params).value
            try:
                bubbles.t_gamma(params, bar)
                failures.append(f"tau={tau} gamma={g}: feasible at the critical constant")
            except InfeasibleError:
                pass
            try:
                bubbles.t_gamma(params, 1.01 * bar)
            except MeanFieldError as e:
                failures.append(f"tau={tau} gamma={g}: infeasible at 1.01x ({e.message})")
    return _result("blowdown", failures, worst)


def check_discrete_constant(ctx: Context) -> CheckResult:
    rng = np.random.default_rng(ctx.settings.seed)
    failures, worst = [], 0.0
    for tau, g in zip(rng.uniform(0.01, 0.99, 50), rng.uniform(0.01, 0.99, 50)):
        params = SpeciesParams(tau=float(tau), gamma=float(g))
        closed = critical_lambda_two_species(params).value
        rel = abs(critical_lambda_discrete(params.to_measure()).value - closed) / closed
        worst = max(worst, rel)
        if rel > 1e-12:
            failures.append(f"tau={tau:.6f} gamma={g:.6f}: {rel:.3e}")
    for tau in (0.1, 0.25, 0.5, 0.9):
        th = gamma_threshold(tau)
        lo = critical_lambda_two_species(SpeciesParams(tau=tau, gamma=th * (1 - 1e-13))).value
        hi = critical_lambda_two_species(SpeciesParams(tau=tau, gamma=th * (1 + 1e-13))).value
        if abs(hi - lo) / lo > 1e-10:
            failures.append(f"tau={tau}: branch jump {abs(hi - lo):.3e}")
    return _result("discrete-constant", failures, worst)


# -----------------------------
# solver accuracy, curves and standard reductions
# -----------------------------
def check_ode_residual(ctx: Context) -> CheckResult:
    s = ctx.settings
    rng = np.random.default_rng(s.seed)
    radii = np.sort(np.exp(rng.uniform(math.log(ODE_RADII[0]), math.log(ODE_RADII[1]), ODE_POINTS)))
    bound = 10.0 * s.rel_tol
    failures, worst = [], 0.0
    cases = [(math.log(8.0), 0.5, 1.0, 0.0)] + [(a, g, 1.0, 1.0) for g, a in ((0.5, 0.0), (0.3, 5.0), (0.7, -5.0))]
    for alpha, g, a, b in cases:
        res = float(np.max(fd_residual(shoot(alpha, g, a=a, b=b, settings=s), radii)))
        worst = max(worst, res)
        if res > bound:
            failures.append(f"alpha={alpha:.6g} gamma={g} a={a} b={b}: {res:.3e} > {bound:.1e}")
    return _result("ode-residual", failures, worst)


def _curve_values(params: SpeciesParams, grid, ctx: Context) -> Tuple[np.ndarray, np.ndarray]:
    curve = lambda_curve(params, grid, ctx.settings, mapper=ctx.mapper())
    if curve.failures:
        raise ParameterError("curve points failed", params=params.model_dump(), failures=len(curve.failures))
    return np.array([p.sigma for p in curve.points]), np.array([p.lambda_value for p in curve.points])


def adjacent_variation(values: np.ndarray) -> float:
    """Largest relative jump between neighbours."""
    return float(np.max(np.abs(np.diff(values)) / np.maximum(np.abs(values[1:]), np.abs(values[:-1]))))


def check_curve_continuity(ctx: Context) -> CheckResult:
    failures, worst = [], 0.0
    for tau, g in ((0.5, 0.5), (0.3, 0.7)):
        params = SpeciesParams(tau=tau, gamma=g)
        beta = beta_boundary(params)
        # the refined grid halves the spacing and keeps every coarse point
        grid = np.linspace(beta + CONTINUITY_OFFSETS[0], beta + CONTINUITY_OFFSETS[1], 2 * CONTINUITY_POINTS - 1)
        sigma, lam = _curve_values(params, grid, ctx)
        for label, values in (("sigma", sigma), ("Lambda", lam)):
            jump = adjacent_variation(values)
            worst = max(worst, jump)
            if jump >= CONTINUITY_JUMP:
                failures.append(f"tau={tau} gamma={g}: {label} jumps {jump:.2%}")
    return _result("curve-continuity", failures, worst)


def check_sigma_trend(ctx: Context) -> CheckResult:
    failures = []
    for g in GRID_GAMMAS:
        early = shoot(10.0, g, settings=ctx.settings)
        late = shoot(30.0, g, settings=ctx.settings)
        for tau in GRID_GAMMAS:
            params = SpeciesParams(tau=tau, gamma=g)
            s10 = sigma_of_alpha(early, params, settings=ctx.settings)
            s30 = sigma_of_alpha(late, params, settings=ctx.settings)
            if not s30 < s10:
                failures.append(f"tau={tau} gamma={g}: sigma(30)={s30:.6g} >= sigma(10)={s10:.6g}")
    return _result("sigma-trend", failures, None)


def check_tau_ordering(ctx: Context) -> CheckResult:
    g = 0.5
    taus = (0.1, 0.3, 0.6)
    start = max(beta_boundary(SpeciesParams(tau=t, gamma=g)) for t in taus) + 0.5
    grid = np.linspace(start, 20.0, 12)
    bank = ProfileBank(g, settings=ctx.settings)
    failures = []
    for alpha in grid:
        profile = bank.get(float(alpha))
        lam = []
        for tau in taus:
            params = SpeciesParams(tau=tau, gamma=g)
            lam.append(lambda_of_alpha(profile, params, sigma_of_alpha(profile, params, settings=ctx.settings),
                                       ctx.settings))
        if not np.all(np.diff(lam) < 0):
            failures.append(f"alpha={alpha:.4g}: Lambda over tau={taus} is {lam}")
    return _result("tau-ordering", failures, None, f"{len(grid)} alphas")


def check_standard_functionals(ctx: Context) -> CheckResult:
    s = ctx.settings
    params = SpeciesParams(tau=1.0, gamma=0.5)
    failures, worst = [], 0.0
    record = find_deterministic_solution(params, 4.0 * math.pi, settings=s)
    candidates = [zero_function()]
    if isinstance(record, SolutionRecord):
        candidates.append(record.samples)
    else:
        failures.append(f"standard solve failed: {record.reason}")
    for lam in (2.0 * math.pi, 4.0 * math.pi):
        for v in candidates:
            ref = functional_standard(v, lam, s)
            for name, value in (("det", functional_det(v, params, lam, s)), ("stoch", functional_stoch(v, params, lam, s))):
                diff = abs(value - ref)
                worst = max(worst, diff)
                if diff > FUNCTIONAL_TOL:
                    failures.append(f"lambda={lam:.6g}: J_{name} - I = {diff:.3e}")
    return _result("standard-functionals", failures, worst)


def check_pohozaev_standard(ctx: Context) -> CheckResult:
    s = ctx.settings
    params = SpeciesParams(tau=1.0, gamma=0.5)
    radii = collocation_radii(s.seed, COLLOCATION_POINTS)
    failures, worst = [], 0.0
    for lam in (2.0 * math.pi, 4.0 * math.pi, 6.0 * math.pi):
        record = find_deterministic_solution(params, lam, settings=s)
        if not isinstance(record, SolutionRecord):
            failures.append(f"lambda={lam:.6g}: not found ({record.reason})")
            continue
        poh = pohozaev_residual(record, s)
        col = pde_residual(record, radii, s)
        worst = max(worst, poh)
        if poh > s.pohozaev_tol:
            failures.append(f"lambda={lam:.6g}: pohozaev {poh:.3e}")
        if col > s.collocation_tol:
            failures.append(f"lambda={lam:.6g}: collocation {col:.3e}")
    return _result("pohozaev-standard", failures, worst)


def check_determinism(ctx: Context) -> CheckResult:
    s = ctx.settings
    run = {"command": "masses", "gamma": 0.5, "alpha": list(DETERMINISM_ALPHAS)}
    digests = []
    with tempfile.TemporaryDirectory() as tmp:
        for k in range(2):
            reports = mass_curve(0.5, DETERMINISM_ALPHAS, s)
            path = write_table(mass_frame(reports), Path(tmp) / f"masses_{k}.csv", run_header(run, s),
                               sort_by=["gamma", "alpha"])
            digests.append(file_md5(path))
    failures = [] if digests[0] == digests[1] else [f"md5 {digests[0]} != {digests[1]}"]
    return _result("determinism", failures, None, digests[0])


CHECKS: Dict[str, Callable[[Context], CheckResult]] = {
    "integrator-oracle": check_integrator_oracle,
    "energy-identity": check_energy_identity,
    "flux-identity": check_flux_identity,
    "mass-bounds": check_mass_bounds,
    "stochastic-curve": check_stochastic_curve,
    "lambda-star": check_lambda_star,
    "tau-monotonicity": check_tau_monotonicity,
    "det-threshold": check_det_threshold,
    "pohozaev-collocation": check_pohozaev_collocation,
    "bubble-closed-forms": check_bubble_closed_forms,
    "blowdown": check_blowdown,
    "discrete-constant": check_discrete_constant,
    "ode-residual": check_ode_residual,
    "curve-continuity": check_curve_continuity,
    "sigma-trend": check_sigma_trend,
    "tau-ordering": check_tau_ordering,
    "standard-functionals": check_standard_functionals,
    "pohozaev-standard": check_pohozaev_standard,
    "determinism": check_determinism,
}


def select(filters: Sequence[str] = ()) -> List[str]:
    if not filters:
        return list(CHECKS)
    unknown = [f for f in filters if f not in CHECKS]
    if unknown:
        raise ParameterError("unknown verify criterion", unknown=unknown, known=list(CHECKS))
    return [name for name in CHECKS if name in filters]


def run_checks(filters: Sequence[str] = (), settings: Optional[Settings] = None) -> List[CheckResult]:
    settings = settings or get_settings()
    ctx = Context(settings)
    results = []
    for name in select(filters):
        try:
            result = CHECKS[name](ctx)
        except MeanFieldError as e:
            result = CheckResult(name=name, passed=False, detail=f"{e.code}: {e.message} {e.detail}")
        logger.info("check %s passed=%s residual=%s", name, result.passed, result.residual)
        results.append(result)
    return results
