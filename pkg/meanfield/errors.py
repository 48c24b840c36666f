# meanfield/errors.py
from typing import Any, Dict


class MeanFieldError(Exception):
    """Base error; `detail` carries the structured context printed by the CLI."""

    code = "meanfield_error"

    def __init__(self, message: str, **detail: Any):
        super().__init__(message)
        self.message = message
        self.detail: Dict[str, Any] = detail

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": self.message, **self.detail}


class ParameterError(MeanFieldError, ValueError):
    code = "parameter_error"


class IntegrationError(MeanFieldError):
    """Step-size underflow or a non-finite state; `detail["radius"]` is where it happened."""

    code = "integration_error"


class FluxNotConvergedError(MeanFieldError):
    code = "flux_not_converged"


class ProfileTooShortError(MeanFieldError):
    code = "profile_too_short"


class InfeasibleError(MeanFieldError):
    code = "infeasible"


class QuadratureError(MeanFieldError):
    code = "quadrature_error"
