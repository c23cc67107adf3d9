"""
Environment configuration management for the simulator.
Handles loading and validation of runtime settings.
"""
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings loaded from HBF_* environment variables."""

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO", description="Logging level"
    )
    workers: int = Field(
        default=1, ge=1, description="Worker processes for independent trials"
    )
    preset: str = Field(
        default="desk", description="Experiment preset used when no config file is given"
    )
    output_dir: str = Field(
        default="results", description="Directory for relative output file names"
    )

    model_config = SettingsConfigDict(
        env_prefix="HBF_", env_file=".env", case_sensitive=False, extra="ignore"
    )

    @field_validator("log_level", mode="before")
    @classmethod
    def upper_level(cls, value):
        return value.upper() if isinstance(value, str) else value


def get_settings() -> Settings:
    """Get runtime settings instance."""
    return Settings()
