# meanfield/schemas.py
import math
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import get_settings
from .errors import ParameterError
from .samples import RadialSamples

EIGHT_PI = 8.0 * math.pi


class Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class Arrays(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# -----------------------------
# params
# -----------------------------
class SpeciesParams(Frozen):
    tau: float = Field(gt=0, le=1)
    gamma: float = Field(gt=0, lt=1)

    @property
    def is_standard(self) -> bool:
        # tau = 1 collapses the measure to δ₁
        return self.tau == 1.0

    def require_two_species(self, op: str) -> "SpeciesParams":
        if self.is_standard:
            raise ParameterError(f"{op} requires 0 < tau < 1", tau=self.tau, gamma=self.gamma)
        return self

    def to_measure(self) -> "DiscreteMeasure":
        if self.is_standard:
            return DiscreteMeasure(atoms=[Atom(weight=1.0, intensity=1.0)])
        return DiscreteMeasure(
            atoms=[Atom(weight=self.tau, intensity=1.0), Atom(weight=1.0 - self.tau, intensity=self.gamma)]
        )


class Atom(Frozen):
    weight: float = Field(gt=0, le=1)
    intensity: float = Field(ge=-1, le=1)


class DiscreteMeasure(Frozen):
    atoms: Tuple[Atom, ...] = ()

    @model_validator(mode="after")
    def _weights_sum_to_one(self):
        if self.atoms:
            total = math.fsum(a.weight for a in self.atoms)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"atom weights sum to {total!r}, expected 1")
        return self

    @property
    def is_dirac_one(self) -> bool:
        return len(self.atoms) == 1 and self.atoms[0].intensity == 1.0


class MTConstant(Frozen):
    value: float
    branch: Literal["perturbative", "mixed", "degenerate"]
    subset: Tuple[int, ...] = ()

    @field_validator("value")
    @classmethod
    def _at_least_8pi(cls, v: float) -> float:
        if v < EIGHT_PI * (1.0 - 1e-14):
            raise ValueError(f"critical constant {v!r} below 8π")
        return v


# -----------------------------
# radial solver
# -----------------------------
def _default(name: str):
    return lambda: getattr(get_settings(), name)


class ShootingConfig(Frozen):
    alpha: float = Field(ge=-40, le=200)
    gamma: float = Field(gt=0, lt=1)
    a: float = Field(1.0, ge=0)
    b: float = Field(1.0, ge=0)
    rel_tol: float = Field(default_factory=_default("rel_tol"), gt=0)
    abs_tol: float = Field(default_factory=_default("abs_tol"), gt=0)
    r_max: float = Field(default_factory=_default("r_max"), gt=1)

    @model_validator(mode="after")
    def _some_nonlinearity(self):
        if self.a + self.b <= 0:
            raise ValueError("a + b must be positive")
        return self

    @property
    def single_exponential(self) -> bool:
        return self.b == 0.0

    def forcing(self, eta):
        """a e^η + b e^{γη}."""
        return self.a * np.exp(eta) + self.b * np.exp(self.gamma * np.asarray(eta))

    @property
    def core_radius(self) -> float:
        """√(8/f(α)); the single-exponential profile is α − 2 ln(1 + (r/L)²) on this scale."""
        return math.sqrt(8.0 / float(self.forcing(self.alpha)))


class ProfileDiagnostics(Frozen):
    inner_steps: int
    outer_steps: int
    rhs_evaluations: int
    seed_radius: float
    far_radius: float
    beta_variation: float
    max_error_estimate: float


class RadialProfile(Arrays):
    config: ShootingConfig
    nodes: RadialSamples
    beta_estimate: float
    diagnostics: ProfileDiagnostics

    @property
    def alpha(self) -> float:
        return self.config.alpha

    @property
    def gamma(self) -> float:
        return self.config.gamma

    @property
    def r_max(self) -> float:
        return self.nodes.r_max


# -----------------------------
# masses
# -----------------------------
class MassReport(Frozen):
    alpha: float
    gamma: float
    a: float = 1.0
    b: float = 1.0
    m1: float
    m_gamma: float
    total: float
    flux_mass: float
    tail_fraction: Tuple[float, float]
    tail_refused: bool = False
    energy_residual: Optional[float] = None


# -----------------------------
# reductions
# -----------------------------
class LambdaCurvePoint(Frozen):
    alpha: float
    sigma: float = Field(ge=0)
    lambda_value: float = Field(ge=0)
    params: SpeciesParams


class LambdaCurve(Frozen):
    params: SpeciesParams
    grid: Tuple[float, ...]
    points: Tuple[LambdaCurvePoint, ...]
    failures: Tuple[Dict[str, Any], ...] = ()

    @property
    def supremum(self) -> Optional[LambdaCurvePoint]:
        if not self.points:
            return None
        return max(self.points, key=lambda p: p.lambda_value)


class SolutionRecord(Arrays):
    kind: Literal["deterministic", "stochastic"]
    params: SpeciesParams
    lambda_value: float
    alpha: float
    radius: float = Field(gt=0)
    shift: float
    samples: RadialSamples
    integrals: Tuple[float, float]
    profile: Optional[RadialProfile] = Field(default=None, exclude=True)

    @property
    def v_center(self) -> float:
        return float(self.samples.y[0])


class NotFound(Frozen):
    params: SpeciesParams
    lambda_value: float
    alpha_range: Tuple[float, float]
    sign_pattern: str = ""
    min_abs_h: Optional[float] = None
    reason: str

    def __bool__(self) -> bool:
        return False


class DeterministicScan(Frozen):
    params: SpeciesParams
    lambda_value: float
    seeds: Tuple[float, ...]
    h_values: Tuple[float, ...]
    brackets: Tuple[Tuple[float, float], ...]
    # edges of the α-range where the first constraint can be met, merged into `seeds`
    onsets: Tuple[float, ...] = ()

    @property
    def sign_pattern(self) -> str:
        return "".join("." if math.isnan(h) else ("+" if h > 0 else "-") for h in self.h_values)

    @property
    def min_abs_h(self) -> Optional[float]:
        valid = [abs(h) for h in self.h_values if not math.isnan(h)]
        return min(valid) if valid else None


class ExistenceRow(Frozen):
    tau: float
    gamma: float
    lambda_value: float
    ratio: float
    found: bool
    min_abs_h: Optional[float] = None
    alpha: Optional[float] = None
    R: Optional[float] = None
    n_roots: int = 0


class DetCurvePoint(Frozen):
    alpha: float
    radius: float
    lambda_value: float


# -----------------------------
# bubbles
# -----------------------------
class Bubble(Frozen):
    delta: float = Field(gt=0, le=1)


class TGamma(Frozen):
    value: float
    t_plus: float
    t_minus: float
    case: Literal[1, 2]


class BlowdownSeries(Frozen):
    params: SpeciesParams
    lambda_value: float
    t_gamma: TGamma
    deltas: Tuple[float, ...]
    values: Tuple[float, ...]
    fitted_slope: float
    predicted_slope: float


# -----------------------------
# cli
# -----------------------------
class RunConfig(Frozen):
    command: str
    tau: Optional[float] = None
    gamma: Optional[float] = None
    measure_path: Optional[str] = None
    alpha: Optional[float] = None
    alpha_min: Optional[float] = None
    alpha_max: Optional[float] = None
    alpha_count: Optional[int] = Field(None, ge=1)
    lambdas: Tuple[float, ...] = ()
    ratios: Tuple[float, ...] = ()
    deltas: Tuple[float, ...] = ()
    rel_tol: Optional[float] = None
    out_dir: str = "out"
    svg: bool = False
    workers: Optional[int] = None
    seed: Optional[int] = None
    filters: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _grids_nonempty(self):
        if self.alpha_count is not None and self.alpha_count < 1:
            raise ValueError("alpha grid is empty")
        if self.alpha_min is not None and self.alpha_max is not None and self.alpha_max < self.alpha_min:
            raise ValueError("alpha grid is empty (alpha_max < alpha_min)")
        return self


class CheckResult(Frozen):
    name: str
    passed: bool
    residual: Optional[float] = None
    detail: str = ""
