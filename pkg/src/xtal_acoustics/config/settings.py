import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Main application settings"""

    model_config = SettingsConfigDict(
        env_prefix="XTAL_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application settings
    app_name: str = Field(default="xtal-acoustics", description="Application name")
    app_version: str = Field(default="0.1.0", description="Application version")

    # Numerics
    threads: int = Field(
        default_factory=lambda: os.cpu_count() or 1,
        ge=1,
        description="Worker threads for band sweeps and spectrum maps (XTAL_THREADS)",
    )
    point_budget: int = Field(
        default=10_000_000,
        ge=1,
        description="Maximum number of coefficient vectors a lattice enumeration may visit",
    )
    tolerance: float = Field(
        default=1e-10, gt=0, description="Tolerance for invariant checks"
    )
    merge_tolerance: float = Field(
        default=1e-9, gt=0, description="Relative tolerance for merging spectrum values"
    )
    rank_tolerance: float = Field(
        default=1e-8,
        gt=0,
        description="Relative singular-value threshold for degenerate cycle spaces",
    )
    quadrature_samples: int = Field(
        default=101, ge=3, description="Default Simpson sample count (odd)"
    )

    # Logging settings
    logging_level: str = Field(default="WARNING", description="Logging level")
    logging_format: str = Field(
        default="{time:YYYY-MM-DD HH:mm:ss} | {extra[app]} v{extra[version]} | {level: <8} | {name}:{function}:{line} - {message} | {extra}",
        description="Console log format",
    )


def get_settings() -> Settings:
    """Retrieve application settings"""
    return Settings()
