# meanfield/params.py
"""Moser–Trudinger critical constants and the boundary constant of the two-species problem."""
import math
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ParameterError
from .schemas import EIGHT_PI, DiscreteMeasure, MTConstant, SpeciesParams

MAX_ATOMS_PER_SIGN = 24
_CHUNK = 1 << 16


def gamma_threshold(tau: float) -> float:
    """√τ/(1+√τ): the intensity where the two minima of the critical constant meet."""
    if not 0.0 < tau < 1.0:
        raise ParameterError("gamma_threshold requires 0 < tau < 1", tau=tau)
    s = math.sqrt(tau)
    return s / (1.0 + s)


def ordering_check(tau: float) -> bool:
    lower = tau / (1.0 + tau)
    return 0.0 < lower < gamma_threshold(tau) < 0.5


def critical_lambda_two_species(params: SpeciesParams) -> MTConstant:
    params.require_two_species("critical_lambda_two_species")
    tau, gamma = params.tau, params.gamma
    if gamma <= gamma_threshold(tau):
        return MTConstant(value=EIGHT_PI / tau, branch="perturbative", subset=(0,))
    s = tau + (1.0 - tau) * gamma
    return MTConstant(value=EIGHT_PI / (s * s), branch="mixed", subset=(0, 1))


def critical_lambda(params: SpeciesParams) -> MTConstant:
    if params.is_standard:
        return MTConstant(value=EIGHT_PI, branch="perturbative", subset=(0,))
    return critical_lambda_two_species(params)


def stochastic_critical_lambda() -> float:
    # the stochastic functional is bounded below iff λ ≤ 8π, whatever the measure
    return EIGHT_PI


def _best_subset(weights: np.ndarray, intensities: np.ndarray) -> Tuple[float, int]:
    """min over nonempty subsets of P(K)/(Σ_K τᵢγᵢ)²; returns (ratio, bitmask)."""
    n = len(weights)
    if n == 0:
        return math.inf, 0
    if n > MAX_ATOMS_PER_SIGN:
        raise ParameterError("too many atoms for exact subset enumeration", atoms=n, limit=MAX_ATOMS_PER_SIGN)
    moments = weights * intensities
    bits = np.arange(n, dtype=np.int64)
    best, best_mask, best_size = math.inf, 0, n + 1
    total = 1 << n
    for start in range(1, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        member = ((masks[:, None] >> bits[None, :]) & 1).astype(float)
        mass = member @ weights
        moment = member @ moments
        with np.errstate(divide="ignore"):
            ratio = np.where(moment != 0.0, mass / np.square(moment), np.inf)
        i = int(np.argmin(ratio))
        size = int(member[i].sum())
        # on ties keep the smaller subset so the single-species branch wins
        if ratio[i] < best or (ratio[i] == best and size < best_size):
            best, best_mask, best_size = float(ratio[i]), int(masks[i]), size
    return best, best_mask


def critical_lambda_discrete(measure: DiscreteMeasure) -> MTConstant:
    if not measure.atoms:
        raise ParameterError("critical_lambda_discrete requires a nonempty measure")
    plus: List[int] = [i for i, a in enumerate(measure.atoms) if a.intensity >= 0.0]
    minus: List[int] = [i for i, a in enumerate(measure.atoms) if a.intensity < 0.0]

    candidates = []
    for idx in (plus, minus):
        w = np.array([measure.atoms[i].weight for i in idx])
        g = np.array([measure.atoms[i].intensity for i in idx])
        ratio, mask = _best_subset(w, g)
        subset = tuple(idx[k] for k in range(len(idx)) if mask >> k & 1)
        candidates.append((ratio, len(subset), subset))

    ratio, size, subset = min(candidates)
    if math.isinf(ratio):
        return MTConstant(value=math.inf, branch="degenerate")
    branch = "perturbative" if size == 1 else "mixed"
    return MTConstant(value=EIGHT_PI * ratio, branch=branch, subset=subset)


def beta_boundary(params: SpeciesParams) -> float:
    """β_{τ,γ} = ln[τ/((1−τ)γ)]/(1−γ), the boundary value of the whole-plane profile."""
    params.require_two_species("beta_boundary")
    tau, gamma = params.tau, params.gamma
    return math.log(tau / ((1.0 - tau) * gamma)) / (1.0 - gamma)


def measure_from_pairs(pairs: Sequence[Tuple[float, float]]) -> DiscreteMeasure:
    return DiscreteMeasure(atoms=[{"weight": w, "intensity": g} for w, g in pairs])
