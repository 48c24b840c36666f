# meanfield/reductions.py
"""Disc solutions rebuilt from whole-plane radial profiles.

A stochastic solution for (τ, γ) is the profile cut where it reaches the
boundary constant β_{τ,γ} and rescaled to the unit disc. A deterministic
solution is a cut radius R at which both partial masses hit their targets
λτ and λ(1-τ)γ; we nest a monotone radius solve inside a sign-change scan
over the shooting height α.
"""
import logging
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect, brentq

from .config import Settings, get_settings
from .errors import MeanFieldError, ParameterError, ProfileTooShortError
from .masses import cumulative_mass, mass_to, partial_mass
from .params import beta_boundary, critical_lambda
from .radial_solver import integrate
from .samples import RadialSamples
from .schemas import (
    EIGHT_PI,
    DetCurvePoint,
    DeterministicScan,
    ExistenceRow,
    LambdaCurve,
    LambdaCurvePoint,
    NotFound,
    RadialProfile,
    ShootingConfig,
    SolutionRecord,
    SpeciesParams,
)

logger = logging.getLogger(__name__)


class ProfileBank:
    """Shooting profiles memoised by α for one (γ, a, b)."""

    def __init__(self, gamma: float, a: float = 1.0, b: float = 1.0, settings: Optional[Settings] = None):
        self.gamma = gamma
        self.a = a
        self.b = b
        self.settings = settings or get_settings()
        self._profiles: Dict[float, RadialProfile] = {}

    def __len__(self) -> int:
        return len(self._profiles)

    def get(self, alpha: float) -> RadialProfile:
        key = float(alpha)
        if key not in self._profiles:
            s = self.settings
            config = ShootingConfig(
                alpha=key, gamma=self.gamma, a=self.a, b=self.b,
                rel_tol=s.rel_tol, abs_tol=s.abs_tol, r_max=s.r_max,
            )
            self._profiles[key] = integrate(config, s)
        return self._profiles[key]


def _bank_for(params: SpeciesParams, bank: Optional[ProfileBank], settings: Settings) -> ProfileBank:
    if bank is None:
        return ProfileBank(params.gamma, settings=settings)
    if bank.gamma != params.gamma or bank.a != 1.0 or bank.b != 1.0:
        raise ParameterError("profile bank does not match the species parameters", gamma=params.gamma)
    return bank


def _require_ab1(profile: RadialProfile, op: str):
    if profile.config.a != 1.0 or profile.config.b != 1.0:
        raise ParameterError(f"{op} requires an a = b = 1 profile", a=profile.config.a, b=profile.config.b)


def _pinned(samples: RadialSamples) -> RadialSamples:
    """Same samples with the boundary value set to exactly 0."""
    return samples.with_boundary(0.0)


# -----------------------------
# level sets and the stochastic map
# -----------------------------
def radius_at_level(profile: RadialProfile, level: float, settings: Optional[Settings] = None) -> float:
    """The unique r with η(r) = level; η is strictly decreasing."""
    settings = settings or get_settings()
    nodes = profile.nodes
    if level >= nodes.y[0]:
        raise ParameterError("level must lie below the center height", level=level, alpha=float(nodes.y[0]))
    if level < nodes.y[-1]:
        raise ProfileTooShortError(
            "profile ends above the requested level",
            level=level, eta_end=float(nodes.y[-1]), r_max=nodes.r_max,
        )
    k = int(np.searchsorted(-nodes.y, -level, side="left"))
    if nodes.y[k] == level:
        return float(nodes.r[k])
    lo, hi = float(nodes.r[k - 1]), float(nodes.r[k])
    return bisect(lambda r: float(nodes.value(r)) - level, lo, hi, xtol=1e-300, rtol=settings.bisection_rtol)


def sigma_of_alpha(profile: RadialProfile, params: SpeciesParams, level: Optional[float] = None,
                   settings: Optional[Settings] = None) -> float:
    """σ_{τ,γ}(α): the radius where the profile reaches β_{τ,γ} (or an explicit `level`)."""
    if level is None:
        _require_ab1(profile, "sigma_of_alpha")
        level = beta_boundary(params)
        if profile.alpha <= level:
            raise ParameterError("alpha must exceed the boundary constant", alpha=profile.alpha, beta=level)
    return radius_at_level(profile, level, settings)


def lambda_of_alpha(profile: RadialProfile, params: SpeciesParams, sigma: float,
                    settings: Optional[Settings] = None) -> float:
    """Λ = ∫_{B_σ} e^η + (1/γ)∫_{B_σ} e^{γη}."""
    gamma = params.gamma
    return partial_mass(profile, 1.0, sigma, settings) + partial_mass(profile, gamma, sigma, settings) / gamma


def build_stochastic_solution(params: SpeciesParams, alpha: float, profile: Optional[RadialProfile] = None,
                              settings: Optional[Settings] = None) -> SolutionRecord:
    settings = settings or get_settings()
    params.require_two_species("build_stochastic_solution")
    if profile is None:
        profile = ProfileBank(params.gamma, settings=settings).get(alpha)
    elif profile.alpha != alpha:
        raise ParameterError("profile was shot from a different alpha", alpha=alpha, profile_alpha=profile.alpha)
    _require_ab1(profile, "build_stochastic_solution")

    beta = beta_boundary(params)
    sigma = sigma_of_alpha(profile, params, settings=settings)
    m1 = partial_mass(profile, 1.0, sigma, settings)
    mg = partial_mass(profile, params.gamma, sigma, settings)
    lam = m1 + mg / params.gamma
    samples = _pinned(profile.nodes.scaled(sigma, beta))
    integrals = (m1 * math.exp(-beta) / sigma ** 2, mg * math.exp(-params.gamma * beta) / sigma ** 2)
    logger.debug("stochastic record tau=%g gamma=%g alpha=%.6g sigma=%.12g lambda=%.12g",
                 params.tau, params.gamma, alpha, sigma, lam)
    return SolutionRecord(
        kind="stochastic", params=params, lambda_value=lam, alpha=alpha,
        radius=sigma, shift=beta, samples=samples, integrals=integrals, profile=profile,
    )


def curve_point(alpha: float, params: SpeciesParams, settings: Optional[Settings] = None,
                bank: Optional[ProfileBank] = None) -> Union[LambdaCurvePoint, dict]:
    """One point of the Λ-curve, or a failure dict carrying the error detail."""
    settings = settings or get_settings()
    try:
        profile = _bank_for(params, bank, settings).get(alpha)
        sigma = sigma_of_alpha(profile, params, settings=settings)
        lam = lambda_of_alpha(profile, params, sigma, settings)
        return LambdaCurvePoint(alpha=alpha, sigma=sigma, lambda_value=lam, params=params)
    except MeanFieldError as e:
        logger.warning("curve point failed alpha=%.6g error=%s", alpha, e.code)
        return {"alpha": alpha, **e.to_dict()}


class _CurvePoint:
    def __init__(self, params: SpeciesParams, settings: Settings):
        self.params = params
        self.settings = settings

    def __call__(self, alpha: float):
        return curve_point(alpha, self.params, self.settings)


def default_alpha_grid(params: SpeciesParams, settings: Optional[Settings] = None,
                       count: Optional[int] = None) -> np.ndarray:
    settings = settings or get_settings()
    beta = beta_boundary(params)
    offsets = np.geomspace(settings.curve_offset_min, settings.curve_offset_max, count or settings.curve_points)
    return beta + offsets


def lambda_curve(params: SpeciesParams, alpha_grid: Optional[Sequence[float]] = None,
                 settings: Optional[Settings] = None, mapper: Callable = map) -> LambdaCurve:
    settings = settings or get_settings()
    params.require_two_species("lambda_curve")
    grid = default_alpha_grid(params, settings) if alpha_grid is None else np.asarray(alpha_grid, dtype=float)
    if grid.size == 0:
        raise ParameterError("alpha grid is empty")
    grid = np.sort(grid)
    beta = beta_boundary(params)
    if grid[0] <= beta:
        raise ParameterError("alpha grid must lie above the boundary constant", alpha=float(grid[0]), beta=beta)

    results = list(mapper(_CurvePoint(params, settings), [float(a) for a in grid]))
    points = tuple(r for r in results if isinstance(r, LambdaCurvePoint))
    failures = tuple(r for r in results if isinstance(r, dict))
    curve = LambdaCurve(params=params, grid=tuple(float(a) for a in grid), points=points, failures=failures)
    sup = curve.supremum
    logger.info("lambda curve tau=%g gamma=%g points=%d failures=%d sup=%.10g",
                params.tau, params.gamma, len(points), len(failures), sup.lambda_value if sup else float("nan"))
    return curve


# -----------------------------
# deterministic problem
# -----------------------------
def _radius_for_mass(profile: RadialProfile, w: float, target: float, settings: Settings) -> Optional[float]:
    """R with ∫_{B_R} e^{wη} = target, or None if the sampled profile never gets there."""
    cum = cumulative_mass(profile, w)
    if target <= 0.0 or target >= cum[-1]:
        return None
    k = int(np.searchsorted(cum, target, side="left"))
    if cum[k] == target:
        return float(profile.nodes.r[k])
    lo, hi = float(profile.nodes.r[k - 1]), float(profile.nodes.r[k])
    return bisect(lambda r: mass_to(profile, w, r) - target, lo, hi, xtol=1e-300, rtol=settings.bisection_rtol)


def _h(profile: RadialProfile, params: SpeciesParams, lam: float, settings: Settings) -> Tuple[float, Optional[float]]:
    """h(α) = ∫_{B_{R₁}} e^{γη} − λ(1−τ)γ, with R₁ matching the first constraint; NaN when R₁ does not exist."""
    R1 = _radius_for_mass(profile, 1.0, lam * params.tau, settings)
    if R1 is None:
        return math.nan, None
    return mass_to(profile, params.gamma, R1) - lam * (1.0 - params.tau) * params.gamma, R1


def _h_at(bank: ProfileBank, alpha: float, params: SpeciesParams, lam: float, settings: Settings) -> float:
    """h at one seed; a profile that cannot be built counts as undefined."""
    try:
        return _h(bank.get(alpha), params, lam, settings)[0]
    except MeanFieldError as e:
        logger.warning("det scan alpha=%.6g gamma=%g skipped: %s", alpha, params.gamma, e.code)
        return math.nan


def _onset(bank: ProfileBank, params: SpeciesParams, lam: float, undefined: float, defined: float,
           settings: Settings) -> Tuple[float, float]:
    """Bisect for the edge of the α-range where R₁ exists; returns (α, h) on the defined side."""
    h_def = _h_at(bank, defined, params, lam, settings)
    while abs(defined - undefined) > settings.onset_xtol * max(1.0, abs(defined)):
        mid = 0.5 * (defined + undefined)
        h_mid = _h_at(bank, mid, params, lam, settings)
        if math.isnan(h_mid):
            undefined = mid
        else:
            defined, h_def = mid, h_mid
    return defined, h_def


def scan_deterministic(params: SpeciesParams, lam: float, bank: Optional[ProfileBank] = None,
                       settings: Optional[Settings] = None) -> DeterministicScan:
    """Sign-change scan of h over the seed grid.

    h is undefined (NaN) wherever the first constraint cannot be met, and its
    roots may sit just past that edge, so every defined/undefined transition
    between seeds is bisected and the edge point joins the samples.
    """
    settings = settings or get_settings()
    params.require_two_species("scan_deterministic")
    bank = _bank_for(params, bank, settings)
    seeds = [float(a) for a in np.linspace(settings.alpha_scan_min, settings.alpha_scan_max, settings.alpha_scan_points)]
    h = [_h_at(bank, a, params, lam, settings) for a in seeds]

    onsets = []
    for i in range(len(seeds) - 1):
        if math.isnan(h[i]) != math.isnan(h[i + 1]):
            undefined, defined = (seeds[i], seeds[i + 1]) if math.isnan(h[i]) else (seeds[i + 1], seeds[i])
            onsets.append(_onset(bank, params, lam, undefined, defined, settings))
    samples = sorted(list(zip(seeds, h)) + onsets)
    alphas = [a for a, _ in samples]
    values = [v for _, v in samples]

    floor = settings.h_floor * lam * (1.0 - params.tau) * params.gamma
    brackets = []
    for i in range(len(alphas) - 1):
        h0, h1 = values[i], values[i + 1]
        if math.isnan(h0) or math.isnan(h1):
            continue
        # a sign change inside the noise floor is not a root
        if np.sign(h0) != np.sign(h1) and abs(h0) > floor and abs(h1) > floor:
            brackets.append((alphas[i], alphas[i + 1]))
    scan = DeterministicScan(
        params=params, lambda_value=lam, seeds=tuple(alphas), h_values=tuple(float(x) for x in values),
        brackets=tuple(brackets), onsets=tuple(a for a, _ in onsets),
    )
    logger.debug("det scan tau=%g gamma=%g lambda=%.10g onsets=%d pattern=%s",
                 params.tau, params.gamma, lam, len(onsets), scan.sign_pattern)
    return scan


def _deterministic_record(params: SpeciesParams, lam: float, profile: RadialProfile, R: float,
                          settings: Settings) -> SolutionRecord:
    shift = float(profile.nodes.value(R))
    m1 = partial_mass(profile, 1.0, R, settings)
    mg = 0.0 if profile.config.single_exponential else partial_mass(profile, params.gamma, R, settings)
    samples = _pinned(profile.nodes.scaled(R, shift))
    i_g = mg * math.exp(-params.gamma * shift) / R ** 2 if mg else samples.radial_integral(
        lambda r, y, dy: np.exp(params.gamma * y), tol=settings.quad_tol)
    return SolutionRecord(
        kind="deterministic", params=params, lambda_value=lam, alpha=profile.alpha,
        radius=R, shift=shift, samples=samples,
        integrals=(m1 * math.exp(-shift) / R ** 2, i_g), profile=profile,
    )


def _solve_standard(params: SpeciesParams, lam: float, settings: Settings) -> Union[SolutionRecord, NotFound]:
    """τ = 1: −Δv = λe^v/∫e^v, cut from the Liouville profile."""
    span = (settings.alpha_scan_min, settings.alpha_scan_max)
    if lam >= EIGHT_PI:
        return NotFound(params=params, lambda_value=lam, alpha_range=span, reason="lambda >= 8π (standard problem)")
    profile = ProfileBank(params.gamma, a=1.0, b=0.0, settings=settings).get(math.log(8.0))
    R = _radius_for_mass(profile, 1.0, lam, settings)
    if R is None:
        return NotFound(params=params, lambda_value=lam, alpha_range=span, reason="mass target beyond sampled profile")
    return _deterministic_record(params, lam, profile, R, settings)


def find_deterministic_solution(params: SpeciesParams, lam: float, bank: Optional[ProfileBank] = None,
                                settings: Optional[Settings] = None,
                                scan: Optional[DeterministicScan] = None) -> Union[SolutionRecord, NotFound]:
    settings = settings or get_settings()
    if lam <= 0:
        raise ParameterError("lambda must be positive", lambda_value=lam)
    if params.is_standard:
        return _solve_standard(params, lam, settings)

    span = (settings.alpha_scan_min, settings.alpha_scan_max)
    if lam * params.tau >= EIGHT_PI:
        return NotFound(params=params, lambda_value=lam, alpha_range=span,
                        reason="lambda*tau >= 8π: first constraint exceeds sup m1")

    bank = _bank_for(params, bank, settings)
    scan = scan or scan_deterministic(params, lam, bank, settings)
    if not scan.brackets:
        return NotFound(params=params, lambda_value=lam, alpha_range=span, sign_pattern=scan.sign_pattern,
                        min_abs_h=scan.min_abs_h, reason="no sign change of h")
    if len(scan.brackets) > 1:
        logger.info("det solve tau=%g gamma=%g lambda=%.10g brackets=%d; returning the first",
                    params.tau, params.gamma, lam, len(scan.brackets))

    lo, hi = scan.brackets[0]
    alpha = brentq(lambda a: _h(bank.get(a), params, lam, settings)[0], lo, hi, xtol=1e-12, rtol=1e-14)
    profile = bank.get(alpha)
    _, R = _h(profile, params, lam, settings)
    record = _deterministic_record(params, lam, profile, R, settings)
    r1, r2 = constraint_residuals(record, settings)
    logger.info("det solve tau=%g gamma=%g lambda=%.10g alpha=%.12g R=%.12g residuals=(%.2e, %.2e)",
                params.tau, params.gamma, lam, alpha, R, r1, r2)
    return record


def constraint_residuals(record: SolutionRecord, settings: Optional[Settings] = None) -> Tuple[float, float]:
    """Relative defects of ∫_{B_R} e^z = λτ and ∫_{B_R} e^{γz} = λ(1−τ)γ."""
    if record.kind != "deterministic" or record.profile is None:
        raise ParameterError("constraint residuals need a deterministic record with its profile")
    p, lam, R = record.params, record.lambda_value, record.radius
    r1 = abs(partial_mass(record.profile, 1.0, R, settings) - lam * p.tau) / (lam * p.tau)
    if p.is_standard:
        return r1, 0.0
    target = lam * (1.0 - p.tau) * p.gamma
    return r1, abs(partial_mass(record.profile, p.gamma, R, settings) - target) / target


def _existence_row(params: SpeciesParams, lam: float, bar: float, bank: Optional[ProfileBank],
                   settings: Settings) -> ExistenceRow:
    scan = None
    if not params.is_standard and lam * params.tau < EIGHT_PI:
        scan = scan_deterministic(params, lam, bank, settings)
    result = find_deterministic_solution(params, lam, bank, settings, scan=scan)
    row = dict(tau=params.tau, gamma=params.gamma, lambda_value=lam, ratio=lam / bar)
    if isinstance(result, SolutionRecord):
        return ExistenceRow(**row, found=True, alpha=result.alpha, R=result.radius,
                            n_roots=len(scan.brackets) if scan else 1)
    return ExistenceRow(**row, found=False, min_abs_h=result.min_abs_h)


def deterministic_existence_scan(params: SpeciesParams, lambda_grid: Iterable[float],
                                 settings: Optional[Settings] = None,
                                 bank: Optional[ProfileBank] = None) -> List[ExistenceRow]:
    settings = settings or get_settings()
    lambdas = sorted(float(x) for x in lambda_grid)
    if not lambdas:
        raise ParameterError("lambda grid is empty")
    bar = critical_lambda(params).value
    if not params.is_standard:
        bank = _bank_for(params, bank, settings)
    rows = [_existence_row(params, lam, bar, bank, settings) for lam in lambdas]
    logger.info("existence scan tau=%g gamma=%g rows=%d found=%d",
                params.tau, params.gamma, len(rows), sum(r.found for r in rows))
    return rows


def threshold_bracket(rows: Sequence[ExistenceRow]) -> Optional[Tuple[float, float]]:
    """(largest λ found, smallest λ not found) when the table flips exactly once."""
    found = [r.lambda_value for r in rows if r.found]
    missing = [r.lambda_value for r in rows if not r.found]
    if not found or not missing or max(found) >= min(missing):
        return None
    return max(found), min(missing)


def deterministic_curve(params: SpeciesParams, alpha_grid: Iterable[float], settings: Optional[Settings] = None,
                        bank: Optional[ProfileBank] = None) -> List[DetCurvePoint]:
    """Solutions parameterised by α: R solves m₁(R)/m_γ(R) = τ/((1−τ)γ), λ = m₁(R)/τ."""
    settings = settings or get_settings()
    params.require_two_species("deterministic_curve")
    bank = _bank_for(params, bank, settings)
    q = params.tau / ((1.0 - params.tau) * params.gamma)
    points = []
    for alpha in sorted(float(a) for a in alpha_grid):
        profile = bank.get(alpha)
        # the density ratio e^{(1−γ)η} decreases in r, so the mass ratio does too
        if math.exp((1.0 - params.gamma) * alpha) <= q:
            logger.debug("det curve alpha=%.6g: center density ratio below target", alpha)
            continue
        c1 = cumulative_mass(profile, 1.0)[1:]
        cg = cumulative_mass(profile, params.gamma)[1:]
        below = np.nonzero(c1 / cg <= q)[0]
        if below.size == 0:
            logger.debug("det curve alpha=%.6g: ratio never reaches target", alpha)
            continue
        k = int(below[0]) + 1
        lo, hi = float(profile.nodes.r[k - 1]), float(profile.nodes.r[k])

        def ratio(r):
            return mass_to(profile, 1.0, r) - q * mass_to(profile, params.gamma, r)

        R = hi if ratio(hi) == 0.0 else bisect(ratio, lo, hi, xtol=1e-300, rtol=settings.bisection_rtol)
        points.append(DetCurvePoint(alpha=alpha, radius=R, lambda_value=partial_mass(profile, 1.0, R, settings) / params.tau))
    return points


# -----------------------------
# certificates
# -----------------------------
def _disc_integrals(samples: RadialSamples, gamma: float, settings: Settings) -> Tuple[float, float]:
    tol = settings.quad_tol
    return (
        samples.radial_integral(lambda r, y, dy: np.exp(y), tol=tol),
        samples.radial_integral(lambda r, y, dy: np.exp(gamma * y), tol=tol),
    )


def pohozaev_residual(record: SolutionRecord, settings: Optional[Settings] = None) -> float:
    """|−π v′(1)² − (−2λ + 2πλ(τ/∫e^v + (1−τ)/∫e^{γv}))|, integrals taken from the record's samples."""
    settings = settings or get_settings()
    if record.kind != "deterministic":
        raise ParameterError("pohozaev_residual applies to deterministic records", kind=record.kind)
    p, lam, v = record.params, record.lambda_value, record.samples
    i1, ig = _disc_integrals(v, p.gamma, settings)
    lhs = -math.pi * float(v.dy[-1]) ** 2
    rhs = -2.0 * lam + 2.0 * math.pi * lam * (p.tau / i1 + ((1.0 - p.tau) / ig if not p.is_standard else 0.0))
    return abs(lhs - rhs)


def pde_residual(record: SolutionRecord, radii, settings: Optional[Settings] = None) -> float:
    """Largest relative collocation residual of the record's disc equation at `radii` in (0, 1)."""
    settings = settings or get_settings()
    p, lam, v = record.params, record.lambda_value, record.samples
    i1, ig = record.integrals
    r = np.asarray(radii, dtype=float)
    y, dy, d2, lap = v.derivatives(r)
    if record.kind == "stochastic":
        rhs = lam * (p.tau * np.exp(y) + (1.0 - p.tau) * p.gamma * np.exp(p.gamma * y)) / (
            p.tau * i1 + (1.0 - p.tau) * ig)
    elif p.is_standard:
        rhs = lam * np.exp(y) / i1
    else:
        rhs = lam * p.tau * np.exp(y) / i1 + lam * (1.0 - p.tau) * p.gamma * np.exp(p.gamma * y) / ig
    residual = np.abs(lap + rhs) / (np.abs(d2) + np.abs(dy) / r + rhs)
    return float(np.max(residual))


def forward_reduce(record: SolutionRecord) -> Tuple[float, float]:
    """(radius, center height) recovered from v alone by the forward reduction maps."""
    p, lam, v = record.params, record.lambda_value, record.samples
    i1, ig = record.integrals
    g = p.gamma
    if record.kind == "stochastic":
        d = p.tau * i1 + (1.0 - p.tau) * ig
        sigma = (lam ** (1.0 - g) * (1.0 - p.tau) * g * p.tau ** (-g) * d ** (g - 1.0)) ** (0.5 / (1.0 - g))
        return sigma, float(v.y[0]) + beta_boundary(p)
    if p.is_standard:
        raise ParameterError("the standard problem has no unique scale; forward map is undefined", tau=p.tau)
    shift = math.log(p.tau * ig / ((1.0 - p.tau) * g * i1)) / (1.0 - g)
    R = math.sqrt(lam * p.tau / (i1 * math.exp(shift)))
    return R, float(v.y[0]) + shift


def rescale_radius(a: float, b: float, gamma: float) -> float:
    """σ with σ^{2(1−γ)} = b/a^γ."""
    if a <= 0 or b <= 0:
        raise ParameterError("a and b must be positive", a=a, b=b)
    if not 0.0 < gamma < 1.0:
        raise ParameterError("gamma must lie in (0, 1)", gamma=gamma)
    return (b / a ** gamma) ** (0.5 / (1.0 - gamma))


def rescale_to_z(v: RadialSamples, a: float, b: float, gamma: float) -> RadialSamples:
    """z(y) = v(y/σ) + ln(a/σ²) on B_σ; turns a e^v + b e^{γv} into e^z + e^{γz}."""
    sigma = rescale_radius(a, b, gamma)
    shift = math.log(a / sigma ** 2)
    return v.affine(shift=shift, stretch=sigma)


# -----------------------------
# functionals
# -----------------------------
def _check_disc(v: RadialSamples):
    if abs(v.r_max - 1.0) > 1e-12 or v.r_min != 0.0 or abs(float(v.y[-1])) > 1e-10:
        raise ParameterError("functional needs samples on [0, 1] with v(1) = 0",
                             r_min=v.r_min, r_max=v.r_max, boundary=float(v.y[-1]))


def _dirichlet(v: RadialSamples, settings: Settings) -> float:
    # ½∫|∇v|² = π∫₀¹ v′² r dr
    return 0.5 * v.radial_integral(lambda r, y, dy: dy * dy, tol=settings.quad_tol)


def functional_det(v: RadialSamples, params: SpeciesParams, lam: float, settings: Optional[Settings] = None) -> float:
    settings = settings or get_settings()
    _check_disc(v)
    i1, ig = _disc_integrals(v, params.gamma, settings)
    value = _dirichlet(v, settings) - lam * params.tau * math.log(i1)
    if not params.is_standard:
        value -= lam * (1.0 - params.tau) * math.log(ig)
    return value


def functional_stoch(v: RadialSamples, params: SpeciesParams, lam: float, settings: Optional[Settings] = None) -> float:
    settings = settings or get_settings()
    _check_disc(v)
    i1, ig = _disc_integrals(v, params.gamma, settings)
    return _dirichlet(v, settings) - lam * math.log(params.tau * i1 + (1.0 - params.tau) * ig)


def functional_standard(v: RadialSamples, lam: float, settings: Optional[Settings] = None) -> float:
    settings = settings or get_settings()
    _check_disc(v)
    return _dirichlet(v, settings) - lam * math.log(v.radial_integral(lambda r, y, dy: np.exp(y), tol=settings.quad_tol))


def zero_function() -> RadialSamples:
    return RadialSamples([0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
