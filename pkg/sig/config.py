"""Configuration management for sig."""

from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from SIG_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="SIG_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    environment: Literal["development", "production"] = Field(default="development")
    log_level: str = Field(default="INFO")

    # Randomised corpora
    seed: int = Field(default=0, description="Seed used when --seed is not given")
    formula_samples: int = Field(default=500, ge=1, description="Random formulas per corpus run")
    formula_depth: int = Field(default=3, ge=0, description="Max modal depth of random formulas")

    # Runs and reports
    default_depth: int = Field(default=2, ge=0, description="Run depth when --depth is not given")
    witness_cap: int = Field(default=32, ge=1, description="Witnesses kept per condition")
    jobs: int = Field(default=1, ge=1, description="Worker threads for the axiom suite")

    # HTTP server (sig serve)
    host: str = Field(default="127.0.0.1")
    port: int = Field(default=8000)

    @property
    def is_production(self) -> bool:
        return self.environment == "production"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
