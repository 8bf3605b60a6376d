#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Runtime settings

Loaded from environment variables (prefix ``CAWS_``) or a ``.env`` file.
Planning parameters do not live here: they belong to the scenario file.

Priority:
1. Environment variables
2. .env file
3. Defaults
"""

import logging
from functools import lru_cache
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


class Settings(BaseSettings):
    """Ambient configuration for the CLI and library logging."""

    model_config = SettingsConfigDict(
        env_prefix="CAWS_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    # ============================================
    # Logging
    # ============================================

    log_level: str = Field("INFO", description="Root log level")
    log_dir: str = Field("logs", description="Directory for rotating log files")
    log_file: str = Field("caws_planner.log", description="Main log file name")
    log_to_file: bool = Field(False, description="Also write logs to files")

    # ============================================
    # Solver
    # ============================================

    # 0 silences IPOPT; 5 is the usual verbose level
    ipopt_print_level: int = Field(0, ge=0, le=12)

    # ============================================
    # Outputs
    # ============================================

    output_dir: str = Field("out", description="Default output directory for CLI runs")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in _LEVELS:
            raise ValueError(f"unknown log level {value!r}")
        return value

    def print_config(self, logger: Optional[logging.Logger] = None) -> None:
        """
        Print the effective settings.

        Args:
            logger: Logger to write to; falls back to print when omitted
        """
        lines = [
            "=" * 60,
            "  caws-planner settings",
            "=" * 60,
            f"  log level:        {self.log_level}",
            f"  file logging:     {'on' if self.log_to_file else 'off'}",
            f"  log directory:    {self.log_dir}",
            f"  log file:         {self.log_file}",
            f"  IPOPT print lvl:  {self.ipopt_print_level}",
            f"  output directory: {self.output_dir}",
            "=" * 60,
        ]
        for line in lines:
            if logger:
                logger.info(line)
            else:
                print(line)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()


if __name__ == "__main__":
    get_settings().print_config()
