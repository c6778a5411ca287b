"""Application configuration using Pydantic settings."""
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application
    app_name: str = "ratfun"
    app_version: str = "1.0.0"
    debug: bool = False

    # Logging
    log_level: str = "WARNING"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Self-checks
    verify_canonical: bool = True
    oracle_max_length: int = 4  # words checked after building a canonical bimachine
    associativity_check_limit: int = 32  # monoid size up to which all triples are checked

    # Coarsening lattice search
    lattice_warn_states: int = 12
    lattice_max_candidates: int = 20000

    # Caching
    cache_max_size: int = 128

    model_config = SettingsConfigDict(
        env_prefix="RATFUN_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
