# meanfield/config.py
import os
from functools import lru_cache
from pathlib import Path
from typing import Optional, Tuple, Type

from pydantic import Field
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

CONFIG_FILE = Path(os.getenv("MEANFIELD_CONFIG", "config.toml"))


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="MEANFIELD_",
        env_file=".env",
        extra="ignore",
        toml_file=CONFIG_FILE,
    )

    # integrator
    rel_tol: float = Field(1e-10, gt=0)
    abs_tol: float = Field(1e-12, gt=0)
    ode_method: str = "DOP853"
    seed_radius: float = Field(1e-6, gt=0)
    switch_radius: float = Field(1.0, gt=0)
    r_max: float = Field(1e6, gt=1)
    far_field_limit: float = Field(1e100, gt=1)
    nodes_per_decade: int = Field(200, ge=20)
    beta_stability: float = Field(1e-8, gt=0)

    # quadrature / masses
    quad_tol: float = Field(1e-10, gt=0)
    tail_margin: float = Field(1e-3, gt=0)

    # reductions
    bisection_rtol: float = Field(1e-12, gt=0)
    alpha_scan_min: float = -40.0
    alpha_scan_max: float = 40.0
    alpha_scan_points: int = Field(161, ge=3)
    h_floor: float = Field(1e-6, ge=0)
    onset_xtol: float = Field(1e-9, gt=0)
    curve_points: int = Field(200, ge=2)
    curve_offset_min: float = Field(1e-3, gt=0)
    curve_offset_max: float = Field(40.0, gt=0)

    # runtime
    workers: Optional[int] = None
    seed: int = 20170901

    # acceptance tolerances used by `verify`
    energy_tol: float = 1e-4
    flux_tol: float = 1e-5
    constraint_tol: float = 1e-8
    pohozaev_tol: float = 1e-5
    collocation_tol: float = 1e-6
    closed_form_tol: float = 1e-8
    slope_tol: float = 0.05

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            TomlConfigSettingsSource(settings_cls),
        )

    def tolerance_header(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "ode_method": self.ode_method,
            "quad_tol": self.quad_tol,
            "beta_stability": self.beta_stability,
            "seed": self.seed,
        }


@lru_cache
def get_settings() -> Settings:
    return Settings()
