"""Configuration management for Hypercheck."""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Precision defaults
    digits: int = 50
    max_terms: int = 400
    consecutive_small: int = 5

    # Sweep execution
    workers: int = 1

    # Output
    report_format: str = "json"
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        case_sensitive = False
        # HYPERCHECK_DIGITS, HYPERCHECK_WORKERS, ...
        env_prefix = "HYPERCHECK_"


# Global settings instance
settings = Settings()
