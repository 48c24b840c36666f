# meanfield/radial_solver.py
"""Shooting for η'' + η'/r = -(a e^η + b e^{γη}), η(0) = α, η'(0) = 0."""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .config import Settings, get_settings
from .errors import FluxNotConvergedError, IntegrationError
from .samples import RadialSamples
from .schemas import ProfileDiagnostics, RadialProfile, ShootingConfig

logger = logging.getLogger(__name__)

LN10 = math.log(10.0)


def seed_radius(config: ShootingConfig, settings: Optional[Settings] = None) -> float:
    settings = settings or get_settings()
    f0 = float(config.forcing(config.alpha))
    # keep f0·r0² ≤ 1e-6 so the dropped O(r⁴) seed term is below rounding
    return min(settings.seed_radius, 1e-3 / math.sqrt(f0))


def flux_closure(p: float, t: float, eta: float, config: ShootingConfig) -> float:
    """Asymptotic decay exponent from the flux p = -rη'(r) at r = e^t.

    Beyond r the remaining mass of a term c·e^{wη} is e/(w(β+p)/2 - 2) with
    e = c·e^{2t+wη}; this is exact while a single term drives the far field.
    The closure g(P) = P - p - Σ e/(w(P+p)/2 - 2) increases from -∞ at its
    last pole, so the root is bracketed to the right of max(p, pole).
    """
    terms = []
    for c, w in ((config.a, 1.0), (config.b, config.gamma)):
        if c > 0.0:
            e = c * math.exp(min(2.0 * t + w * eta, 700.0))
            if e > 0.0:
                terms.append((w, e))
    if not terms:
        return p

    def g(P):
        return P - p - sum(e / (w * (P + p) / 2.0 - 2.0) for w, e in terms)

    base = max(p, max(4.0 / w - p for w, _ in terms))
    scale = max(1.0, abs(base))
    lo = scale
    while g(base + lo) >= 0.0:
        lo *= 0.0625
        if base + lo == base:
            return base + lo
    hi = 2.0 * lo
    while g(base + hi) <= 0.0:
        hi *= 2.0
        if not math.isfinite(hi):
            raise FluxNotConvergedError("flux closure has no root", flux=p, log_radius=t)
    try:
        return brentq(g, base + lo, base + hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    except (ValueError, RuntimeError) as e:
        raise FluxNotConvergedError(f"flux closure failed: {e}", flux=p, log_radius=t)


def _closure_at(nodes_r, eta, deta, k: int, config: ShootingConfig) -> float:
    r = float(nodes_r[k])
    return flux_closure(-r * float(deta[k]), math.log(r), float(eta[k]), config)


def _flux_variation(r, eta, deta, config: ShootingConfig) -> Tuple[float, float]:
    last = len(r) - 1
    prev = int(np.searchsorted(r, r[last] / 10.0))
    b_last = _closure_at(r, eta, deta, last, config)
    b_prev = _closure_at(r, eta, deta, prev, config)
    return b_last, abs(b_last - b_prev) / abs(b_last)


def _check(sol, label: str, to_radius):
    if sol.status < 0:
        raise IntegrationError(f"{label} integration failed: {sol.message}", radius=float(to_radius(sol.t[-1])))
    if not np.all(np.isfinite(sol.y)):
        bad = int(np.argmax(~np.all(np.isfinite(sol.y), axis=0)))
        raise IntegrationError(f"non-finite state in {label} integration", radius=float(to_radius(sol.t[bad])))


def node_radii(core: float, r_far: float, per_decade: int) -> Tuple[np.ndarray, Optional[float]]:
    """Uniform nodes on [0, core] at half the log step, then geometric nodes up to r_far.

    Returns the radii and the radius where the geometric part starts (None if it is empty).
    """
    step = LN10 / per_decade
    core_end = min(core, r_far)
    n_core = max(2, int(math.ceil(2.0 * core_end / (core * step))))
    inner = np.linspace(0.0, core_end, n_core + 1)
    if core_end >= r_far:
        return inner, None
    n_log = max(1, int(math.ceil(math.log(r_far / core_end) / step)))
    outer = core_end * np.exp(step * np.arange(1, n_log + 1))
    outer[-1] = r_far
    if n_log >= 2 and r_far / outer[-2] < math.exp(0.5 * step):
        outer = np.delete(outer, -2)
    return np.concatenate((inner, outer)), core_end


def _dense_values(r, alpha: float, inner, chunks: List, r_switch: float):
    eta = np.empty_like(r)
    deta = np.empty_like(r)
    center = r == 0.0
    eta[center], deta[center] = alpha, 0.0
    near = (r > 0.0) & (r <= r_switch)
    if near.any():
        eta[near], deta[near] = inner.sol(r[near])
    far = r > r_switch
    if far.any():
        ends = np.array([c.t[-1] for c in chunks])
        t = np.minimum(np.log(r[far]), ends[-1])
        owner = np.minimum(np.searchsorted(ends, t, side="left"), len(chunks) - 1)
        e_far, s_far = np.empty_like(t), np.empty_like(t)
        for i in np.unique(owner):
            pick = owner == i
            e_far[pick], s_far[pick] = chunks[i].sol(t[pick])
        eta[far] = e_far
        deta[far] = s_far / r[far]
    return eta, deta


def integrate(config: ShootingConfig, settings: Optional[Settings] = None) -> RadialProfile:
    settings = settings or get_settings()
    a, b, gamma, alpha = config.a, config.b, config.gamma, config.alpha
    method, rtol, atol = settings.ode_method, config.rel_tol, config.abs_tol

    f0 = float(config.forcing(alpha))
    r0 = seed_radius(config, settings)
    r_switch = settings.switch_radius

    # -----------------------------
    # inner region in r, Taylor seed at r0
    # -----------------------------
    def rhs_r(r, y):
        return [y[1], -y[1] / r - (a * math.exp(y[0]) + b * math.exp(gamma * y[0]))]

    y0 = [alpha - f0 * r0 * r0 / 4.0, -f0 * r0 / 2.0]
    inner = solve_ivp(rhs_r, (r0, r_switch), y0, method=method, rtol=rtol, atol=atol, dense_output=True)
    _check(inner, "inner", lambda r: r)

    # -----------------------------
    # far field in t = ln r, one decade per chunk
    # -----------------------------
    def rhs_t(t, y):
        return [y[1], -(a * math.exp(2.0 * t + y[0]) + b * math.exp(2.0 * t + gamma * y[0]))]

    t = math.log(r_switch)
    state = [float(inner.y[0, -1]), float(r_switch * inner.y[1, -1])]
    t_min_stop = math.log(config.r_max)
    t_limit = math.log(settings.far_field_limit)
    chunks = []
    outer_steps, nfev = 0, inner.nfev
    prev_beta = None
    beta, variation = math.nan, math.inf
    while True:
        t_next = t + LN10
        chunk = solve_ivp(rhs_t, (t, t_next), state, method=method, rtol=rtol, atol=atol, dense_output=True)
        _check(chunk, "far-field", math.exp)
        chunks.append(chunk)
        outer_steps += len(chunk.t) - 1
        nfev += chunk.nfev
        t, state = t_next, [float(chunk.y[0, -1]), float(chunk.y[1, -1])]

        beta = flux_closure(-state[1], t, state[0], config)
        if prev_beta is not None:
            variation = abs(beta - prev_beta) / abs(beta)
        prev_beta = beta
        if t >= t_min_stop and variation < settings.beta_stability:
            break
        if t >= t_limit:
            raise FluxNotConvergedError(
                "flux did not stabilise before the far-field limit",
                residual=variation, radius=math.exp(t), alpha=alpha, gamma=gamma,
            )

    r, log_from = node_radii(config.core_radius, math.exp(t), settings.nodes_per_decade)
    eta, deta = _dense_values(r, alpha, inner, chunks, r_switch)
    lap = -config.forcing(eta)
    d2eta = np.empty_like(eta)
    d2eta[0] = -f0 / 2.0
    d2eta[1:] = lap[1:] - deta[1:] / r[1:]

    nodes = RadialSamples(r, eta, deta, d2eta, log_from=log_from, laplacian=lap)
    residual = _midpoint_residual(nodes, config)
    diagnostics = ProfileDiagnostics(
        inner_steps=len(inner.t) - 1,
        outer_steps=outer_steps,
        rhs_evaluations=nfev,
        seed_radius=r0,
        far_radius=float(r[-1]),
        beta_variation=variation,
        max_error_estimate=residual,
    )
    logger.debug(
        "integrated alpha=%.6g gamma=%.4g a=%g b=%g nodes=%d far=%.3g beta=%.12g var=%.2e mid=%.2e",
        alpha, gamma, a, b, len(r), r[-1], beta, variation, residual,
    )
    return RadialProfile(config=config, nodes=nodes, beta_estimate=beta, diagnostics=diagnostics)


def _midpoint_residual(nodes: RadialSamples, config: ShootingConfig) -> float:
    """Largest ODE residual of the interpolant between nodes, relative to the size of its terms."""
    mid = 0.5 * (nodes.r[1:] + nodes.r[:-1])
    eta, deta, d2, lap = nodes.derivatives(mid)
    f = config.forcing(eta)
    scale = np.abs(d2) + np.abs(deta) / mid + f
    return float(np.max(np.abs(lap + f) / scale))


def ode_residual(profile: RadialProfile, r) -> np.ndarray:
    """|η'' + η'/r + f(η)| / f(η) at radii r > 0, from the interpolant."""
    r = np.asarray(r, dtype=float)
    eta = profile.nodes.value(r)
    f = profile.config.forcing(eta)
    return np.abs(profile.nodes.laplacian(r) + f) / f


def fd_residual(profile: RadialProfile, r, rel_step: float = 1e-5) -> np.ndarray:
    """|Δη + f(η)| / f(η) with Δη = (rη')'/r from central differences of `evaluate`."""
    r = np.asarray(r, dtype=float)
    h = rel_step * r
    _, d_plus = evaluate(profile, r + h)
    _, d_minus = evaluate(profile, r - h)
    lap = ((r + h) * d_plus - (r - h) * d_minus) / (2.0 * h * r)
    f = profile.config.forcing(evaluate(profile, r)[0])
    return np.abs(lap + f) / f


def estimate_beta(profile: RadialProfile, settings: Optional[Settings] = None) -> float:
    settings = settings or get_settings()
    nodes = profile.nodes
    beta, variation = _flux_variation(nodes.r, nodes.y, nodes.dy, profile.config)
    if variation >= settings.beta_stability:
        raise FluxNotConvergedError(
            "flux functional still varying over the last decade",
            residual=variation, radius=nodes.r_max,
        )
    return beta


def evaluate(profile: RadialProfile, r):
    """(η(r), η'(r)) by quintic Hermite interpolation; exact at nodes."""
    return profile.nodes(r)


def curvature(profile: RadialProfile, r):
    return profile.nodes.curvature(r)


def flux(profile: RadialProfile) -> np.ndarray:
    """-rη'(r) at every node; equals the enclosed mass over 2π."""
    return -profile.nodes.r * profile.nodes.dy


def shoot(alpha: float, gamma: float, a: float = 1.0, b: float = 1.0,
          settings: Optional[Settings] = None, **overrides) -> RadialProfile:
    settings = settings or get_settings()
    config = ShootingConfig(
        alpha=alpha, gamma=gamma, a=a, b=b,
        rel_tol=overrides.get("rel_tol", settings.rel_tol),
        abs_tol=overrides.get("abs_tol", settings.abs_tol),
        r_max=overrides.get("r_max", settings.r_max),
    )
    return integrate(config, settings)
