"""Configuration management"""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings"""

    # Environment
    DEBUG: bool = True
    PORT: int = 8000
    LOG_LEVEL: str = "INFO"

    # Equation of state (polytropic gas, c=1 units)
    GAMMA: float = 4.0 / 3.0
    EOS_A: float = 1.0
    ALLOW_STIFF_GAMMA: bool = False  # permit gamma > 2 (causality then reported, not assumed)

    # Admissibility margins
    PBAR: float = 0.1
    NU: float = 0.05
    KAPPA: float = 0.1
    EPSILON: float = 0.1
    BASIC_STATE_BOUND_K: float = 10.0

    # Numerics
    JUMP_TOL: float = 1e-9
    DISSIPATION: float = 0.01
    CFL: float = 0.25
    DOMAIN_DEPTH: float = 10.0
    CUTOFF_KIND: str = "quintic"  # "quintic" (C2) or "smooth" (C-infinity)

    # Reproducibility
    DEFAULT_SEED: int = 20240611
    SCHEMA_VERSION: int = 1

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
