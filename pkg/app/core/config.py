"""
Application Configuration
Centralized configuration management using Pydantic Settings.
"""

from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_prefix="LIBRATION_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Project Information
    PROJECT_NAME: str = "Libration Stability Toolkit"
    PROJECT_VERSION: str = "0.1.0"
    DESCRIPTION: str = (
        "Triangular equilibrium points, first-order normalization and linear "
        "stability of the photogravitational restricted three-body problem "
        "with Poynting-Robertson drag and oblateness"
    )

    # API Configuration
    API_V1_STR: str = "/api/v1"

    # Environment
    ENVIRONMENT: str = "development"
    DEBUG: bool = False

    # Logging
    LOG_FILE: Optional[str] = None
    LOG_LEVEL: str = "INFO"

    # Equilibria
    NEWTON_TOL: float = 1e-12
    NEWTON_MAX_ITER: int = 50
    FD_STEP: float = 1e-7

    # Spectrum and resonances
    MARGINAL_TOL: float = 1e-12
    RESONANCE_TOL: float = 1e-3
    EXACT_RESONANCE_TOL: float = 1e-9
    RESONANCE_MAX_ORDER: int = 4

    # Integrator
    INTEGRATOR_TOL: float = 1e-10
    CLOSE_APPROACH_RADIUS: float = 1e-6
    SAMPLE_STRIDE: float = 0.1
    GROWTH_SATURATION: float = 1e-2
    GROWTH_THRESHOLD: float = 1e-3

    # Sweeps
    CRITICAL_MASS_TOL: float = 1e-10
    CRITICAL_MASS_MAX_ITER: int = 60
    SWEEP_WORKERS: Optional[int] = None


# Create settings instance
settings = Settings()
