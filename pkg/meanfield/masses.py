# meanfield/masses.py
"""Species masses m₁ = ∫e^η, m_γ = ∫e^{γη} over the plane, with power-law tails."""
import logging
import math
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from .config import Settings, get_settings
from .errors import ParameterError
from .radial_solver import integrate
from .schemas import EIGHT_PI, MassReport, RadialProfile, ShootingConfig

logger = logging.getLogger(__name__)


def _density(w: float):
    return lambda r, y, dy: np.exp(w * y)


def partial_mass(profile: RadialProfile, exponent_weight: float, R: float,
                 settings: Optional[Settings] = None) -> float:
    """2π∫₀^R e^{wη} r dr."""
    settings = settings or get_settings()
    if R < 0:
        raise ParameterError("radius must be nonnegative", radius=R)
    if R == 0:
        return 0.0
    return profile.nodes.radial_integral(_density(exponent_weight), upper=R, tol=settings.quad_tol)


def cumulative_mass(profile: RadialProfile, exponent_weight: float) -> np.ndarray:
    """Running mass 2π∫₀^{r_k} e^{wη} r dr at every node."""
    return profile.nodes.cumulative(("mass", float(exponent_weight)), _density(exponent_weight))


def mass_to(profile: RadialProfile, exponent_weight: float, R: float) -> float:
    """Partial mass from the cached node totals plus one panel; cheap enough for root finding."""
    w = float(exponent_weight)
    return profile.nodes.integral_to(("mass", w), _density(w), R)


def _tail(profile: RadialProfile, w: float, margin: float) -> Tuple[float, bool]:
    nodes = profile.nodes
    R = nodes.r_max
    beta = profile.beta_estimate
    if w * beta - 2.0 < margin:
        return 0.0, True
    # secant slope between the local flux and its limit
    p_R = -R * float(nodes.dy[-1])
    slope = w * 0.5 * (beta + p_R) - 2.0
    return 2.0 * math.pi * math.exp(2.0 * math.log(R) + w * float(nodes.y[-1])) / slope, False


def compute_masses(profile: RadialProfile, settings: Optional[Settings] = None) -> MassReport:
    settings = settings or get_settings()
    cfg = profile.config
    gamma = cfg.gamma

    body1 = partial_mass(profile, 1.0, profile.r_max, settings)
    tail1, refused1 = _tail(profile, 1.0, settings.tail_margin)
    m1 = body1 + tail1

    if cfg.single_exponential:
        mg, tailg, refusedg = 0.0, 0.0, False
    else:
        bodyg = partial_mass(profile, gamma, profile.r_max, settings)
        tailg, refusedg = _tail(profile, gamma, settings.tail_margin)
        mg = bodyg + tailg

    refused = refused1 or refusedg
    if refused:
        logger.warning(
            "tail refused alpha=%.6g gamma=%.4g beta=%.10g margin=%g; masses are truncation-only",
            cfg.alpha, gamma, profile.beta_estimate, settings.tail_margin,
        )

    report = MassReport(
        alpha=cfg.alpha,
        gamma=gamma,
        a=cfg.a,
        b=cfg.b,
        m1=m1,
        m_gamma=mg,
        total=cfg.a * m1 + cfg.b * mg,
        flux_mass=2.0 * math.pi * profile.beta_estimate,
        tail_fraction=(tail1 / m1 if m1 else 0.0, tailg / mg if mg else 0.0),
        tail_refused=refused,
    )
    if cfg.a == 1.0 and cfg.b == 1.0:
        report = report.model_copy(update={"energy_residual": energy_identity_residual(report)})
    logger.debug("masses alpha=%.6g gamma=%.4g m1=%.12g mg=%.12g total=%.12g", cfg.alpha, gamma, m1, mg, report.total)
    return report


def energy_identity_residual(report: MassReport) -> float:
    """Relative defect of (m₁+m_γ)² = 8π(m₁ + m_γ/γ)."""
    if report.b == 0.0 or report.a != 1.0 or report.b != 1.0:
        raise ParameterError("energy identity holds only for a = b = 1 profiles", a=report.a, b=report.b)
    rhs = EIGHT_PI * (report.m1 + report.m_gamma / report.gamma)
    return abs((report.m1 + report.m_gamma) ** 2 - rhs) / rhs


def flux_residual(report: MassReport) -> float:
    return abs(report.total - report.flux_mass) / report.total


def mass_limits(gamma: float) -> Tuple[float, float]:
    """(lim_{α→+∞} m, lim_{α→−∞} m) for the total mass."""
    if not 0.0 < gamma < 1.0:
        raise ParameterError("gamma must lie in (0, 1)", gamma=gamma)
    return EIGHT_PI * max(1.0, (1.0 - gamma) / gamma), EIGHT_PI / gamma


def masses_at(alpha: float, gamma: float, settings: Optional[Settings] = None) -> MassReport:
    settings = settings or get_settings()
    config = ShootingConfig(
        alpha=alpha, gamma=gamma,
        rel_tol=settings.rel_tol, abs_tol=settings.abs_tol, r_max=settings.r_max,
    )
    return compute_masses(integrate(config, settings), settings)


def mass_curve(gamma: float, alpha_grid: Iterable[float], settings: Optional[Settings] = None,
               mapper: Callable = map) -> List[MassReport]:
    settings = settings or get_settings()
    alphas = sorted(float(a) for a in alpha_grid)
    if not alphas:
        raise ParameterError("alpha grid is empty")
    reports = list(mapper(_MassesAt(gamma, settings), alphas))
    logger.info("mass curve gamma=%.4g points=%d", gamma, len(reports))
    return reports


class _MassesAt:
    """Picklable closure for process pools."""

    def __init__(self, gamma: float, settings: Settings):
        self.gamma = gamma
        self.settings = settings

    def __call__(self, alpha: float) -> MassReport:
        return masses_at(alpha, self.gamma, self.settings)
