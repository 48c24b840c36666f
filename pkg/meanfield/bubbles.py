# meanfield/bubbles.py
"""Projected Liouville bubbles PU_δ on the unit disc and the blow-down of J^d_λ along t·PU_δ.

PU_δ(r) = 2 ln((δ²+1)/(δ²+r²)) vanishes on |x| = 1 and has −ΔPU_δ = 8δ²/(δ²+r²)².
Every integral the blow-down needs has a closed form.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .config import Settings, get_settings
from .errors import InfeasibleError, ParameterError
from .params import critical_lambda_two_species, gamma_threshold
from .schemas import EIGHT_PI, BlowdownSeries, Bubble, SpeciesParams, TGamma

logger = logging.getLogger(__name__)

# relative tolerance under which a discriminant counts as zero
DISCRIMINANT_RTOL = 1e-12


def pu_eval(delta: float, r):
    d = Bubble(delta=delta).delta ** 2
    r = np.asarray(r, dtype=float)
    return 2.0 * np.log((d + 1.0) / (d + r * r))


def pu_slope(delta: float, r):
    d = delta * delta
    r = np.asarray(r, dtype=float)
    return -4.0 * r / (d + r * r)


def pu_laplacian_residual(delta: float, r) -> np.ndarray:
    """|PU″ + PU′/r + e^{U_δ}| / e^{U_δ} at r > 0, derivatives in closed form."""
    d = delta * delta
    r = np.asarray(r, dtype=float)
    source = 8.0 * d / (d + r * r) ** 2
    second = -4.0 * (d - r * r) / (d + r * r) ** 2
    return np.abs(second + pu_slope(delta, r) / r + source) / source


def gradient_energy(delta: float) -> float:
    """∫_{B₁} |∇PU_δ|²."""
    d = Bubble(delta=delta).delta ** 2
    return 16.0 * math.pi * (math.log1p(1.0 / d) + d / (d + 1.0) - 1.0)


def log_exp_integral(delta: float, a: float) -> float:
    """ln ∫_{B₁} e^{a·PU_δ} for any a > 0, without forming the integral itself."""
    if a <= 0:
        raise ParameterError("exponent weight must be positive", a=a)
    d = Bubble(delta=delta).delta ** 2
    L = math.log1p(1.0 / d)
    c = 1.0 - 2.0 * a
    # ∫ = π(1+d)^{2a} d^c (e^{cL} − 1)/c, which tends to π(1+d)L as c → 0
    if c == 0.0:
        tail = math.log(L)
    elif c * L > 30.0:
        tail = c * L + math.log1p(-math.exp(-c * L)) - math.log(c)
    else:
        tail = math.log(math.expm1(c * L) / c)
    return math.log(math.pi) + 2.0 * a * math.log1p(d) + c * math.log(d) + tail


def exp_integral(delta: float, a: float) -> float:
    return math.exp(log_exp_integral(delta, a))


# -----------------------------
# independent quadrature
# -----------------------------
def _radial_quad(f, delta: float) -> float:
    val, _ = quad(lambda r: 2.0 * math.pi * f(r) * r, 0.0, 1.0, points=[min(delta, 0.5)],
                  epsabs=0.0, epsrel=1e-12, limit=400)
    return val


def gradient_energy_quadrature(delta: float) -> float:
    return _radial_quad(lambda r: float(pu_slope(delta, r)) ** 2, delta)


def exp_integral_quadrature(delta: float, a: float) -> float:
    return _radial_quad(lambda r: math.exp(a * float(pu_eval(delta, r))), delta)


# -----------------------------
# t_γ
# -----------------------------
def _roots(p: float, q: float):
    """Roots of 8πt² − 2pt + q = 0, or InfeasibleError when they do not straddle a gap."""
    disc = p * p - EIGHT_PI * q
    if disc <= DISCRIMINANT_RTOL * p * p:
        raise InfeasibleError("quadratic has no interior (discriminant <= 0)", discriminant=disc)
    root = math.sqrt(disc)
    return (p + root) / EIGHT_PI, (p - root) / EIGHT_PI


def t_gamma_case1(params: SpeciesParams, lam: float) -> TGamma:
    """t with 8πt² − 2λst + λ < 0 and γt > 1/2, taken as t₊ − t₊·2^{−k} for the first k that works."""
    params.require_two_species("t_gamma_case1")
    tau, gamma = params.tau, params.gamma
    if gamma <= tau / (1.0 + tau):
        raise ParameterError("case 1 needs gamma > tau/(1+tau)", tau=tau, gamma=gamma)
    s = tau + (1.0 - tau) * gamma
    t_plus, t_minus = _roots(lam * s, lam)
    for k in range(1, 64):
        t = t_plus - t_plus * 2.0 ** (-k)
        if EIGHT_PI * t * t - 2.0 * lam * s * t + lam < 0.0 and gamma * t > 0.5:
            return TGamma(value=t, t_plus=t_plus, t_minus=t_minus, case=1)
    raise InfeasibleError("no strictly feasible t below t+", t_plus=t_plus, t_minus=t_minus)


def t_gamma_case2(params: SpeciesParams, lam: float) -> TGamma:
    """Midpoint of (max(1/2, t₋), min(1/(2γ), t₊)) where 8πt² − λτ(2t − 1) < 0."""
    params.require_two_species("t_gamma_case2")
    tau, gamma = params.tau, params.gamma
    if gamma >= 0.5:
        raise ParameterError("case 2 needs gamma < 1/2", gamma=gamma)
    t_plus, t_minus = _roots(lam * tau, lam * tau)
    if t_minus <= 0.5:
        logger.warning("t- = %.12g not above 1/2 (tau=%g lambda=%.10g)", t_minus, tau, lam)
    lo, hi = max(0.5, t_minus), min(0.5 / gamma, t_plus)
    if lo >= hi:
        raise InfeasibleError("feasible interval is empty", lower=lo, upper=hi, t_minus=t_minus)
    t = 0.5 * (lo + hi)
    return TGamma(value=t, t_plus=t_plus, t_minus=t_minus, case=2)


def t_gamma(params: SpeciesParams, lam: float) -> TGamma:
    if params.gamma >= gamma_threshold(params.tau):
        return t_gamma_case1(params, lam)
    return t_gamma_case2(params, lam)


def predicted_slope(params: SpeciesParams, lam: float, tg: TGamma) -> float:
    t, tau, gamma = tg.value, params.tau, params.gamma
    if tg.case == 1:
        return EIGHT_PI * t * t - 2.0 * lam * (tau + (1.0 - tau) * gamma) * t + lam
    return EIGHT_PI * t * t - lam * tau * (2.0 * t - 1.0)


def functional_on_bubble(params: SpeciesParams, lam: float, t: float, delta: float) -> float:
    """J^d_λ(t·PU_δ) from the closed forms."""
    tau, gamma = params.tau, params.gamma
    value = 0.5 * t * t * gradient_energy(delta) - lam * tau * log_exp_integral(delta, t)
    if not params.is_standard:
        value -= lam * (1.0 - tau) * log_exp_integral(delta, gamma * t)
    return value


def blowdown_series(params: SpeciesParams, lam: float, deltas: Sequence[float],
                    settings: Optional[Settings] = None) -> BlowdownSeries:
    settings = settings or get_settings()
    params.require_two_species("blowdown_series")
    deltas = [Bubble(delta=d).delta for d in deltas]
    if len(deltas) < 3:
        raise ParameterError("blow-down needs at least three deltas", count=len(deltas))
    bar = critical_lambda_two_species(params).value
    if lam <= bar:
        raise InfeasibleError("lambda must exceed the critical constant", lambda_value=lam, critical=bar)

    tg = t_gamma(params, lam)
    values = [functional_on_bubble(params, lam, tg.value, d) for d in deltas]

    # fit over the smaller-δ half, where the bounded remainder has settled
    order = np.argsort(deltas)
    keep = order[: max(3, (len(deltas) + 1) // 2)]
    x = np.array([math.log(1.0 / deltas[i] ** 2) for i in keep])
    y = np.array([values[i] for i in keep])
    slope = float(np.polyfit(x, y, 1)[0])
    predicted = predicted_slope(params, lam, tg)
    logger.info("blowdown tau=%g gamma=%g lambda=%.10g case=%d t=%.12g slope=%.8g predicted=%.8g",
                params.tau, params.gamma, lam, tg.case, tg.value, slope, predicted)
    return BlowdownSeries(
        params=params, lambda_value=lam, t_gamma=tg,
        deltas=tuple(deltas), values=tuple(values), fitted_slope=slope, predicted_slope=predicted,
    )


def geometric_deltas(first: int = 5, last: int = 12) -> list:
    return [2.0 ** (-k) for k in range(first, last + 1)]
