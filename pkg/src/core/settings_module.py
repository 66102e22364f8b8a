"""
Core Settings Module

Manages Loccsmith tolerances and numerical defaults.
Values come from LOCCSMITH_* environment variables or a .env file and can
be overridden at runtime (the CLI does this for --tolerance and friends).

This is CORE functionality - required for Loccsmith to work.
"""

from typing import Any, Dict, Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from .logging_module import get_logger

logger = get_logger('loccsmith.core.settings')


class LoccsmithSettings(BaseSettings):
    """Environment-backed configuration."""

    model_config = SettingsConfigDict(
        env_prefix="LOCCSMITH_",
        env_file=".env",
        extra="ignore",
        validate_assignment=True,
    )

    # Tolerances
    unitarity_tol: float = 1e-10
    rank_rel_tol: float = 1e-8
    residual_tol: float = 1e-9
    cocycle_tol: float = 1e-10
    unit_modulus_tol: float = 1e-12
    norm_tol: float = 1e-9
    commute_tol: float = 1e-10
    diagonal_tol: float = 1e-9
    phase_match_tol: float = 1e-7

    # Entangling-strength estimator
    estimator_restarts: int = 32
    estimator_xtol: float = 1e-7
    estimator_max_evaluations: int = 20000
    seed: int = 0

    # Logging
    log_level: str = "INFO"
    log_format: str = "text"


class SettingsModule:
    """
    Core module for managing Loccsmith settings.

    Wraps a LoccsmithSettings instance so callers can read tolerances by
    name and the CLI can override them for the duration of a run.
    """

    def __init__(self):
        """Initialize settings from the environment."""
        self._settings = LoccsmithSettings()

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a setting value.

        Args:
            key: Setting key
            default: Value returned for unknown keys

        Returns:
            Setting value or default
        """
        return getattr(self._settings, key, default)

    def set(self, key: str, value: Any) -> None:
        """
        Set a setting value.

        Args:
            key: Setting key
            value: Setting value

        Raises:
            KeyError: If the key is not a known setting
        """
        if key not in LoccsmithSettings.model_fields:
            raise KeyError(f"Unknown setting '{key}'")
        setattr(self._settings, key, value)
        logger.debug("Setting %s = %r", key, value)

    def update(self, values: Dict[str, Any]) -> None:
        """Set several values, skipping None entries."""
        for key, value in values.items():
            if value is not None:
                self.set(key, value)

    def get_all(self) -> Dict[str, Any]:
        """
        Get all settings.

        Returns:
            Dictionary of all settings
        """
        return self._settings.model_dump()

    def reset(self) -> None:
        """Reload defaults and environment values, dropping overrides."""
        self._settings = LoccsmithSettings()

    def resolve(self, key: str, value: Optional[Any]) -> Any:
        """Return value unless it is None, in which case the setting."""
        return self.get(key) if value is None else value

    # ========================================================================
    # CONVENIENCE PROPERTIES
    # ========================================================================

    @property
    def unitarity_tol(self) -> float:
        return self.get("unitarity_tol")

    @property
    def rank_rel_tol(self) -> float:
        return self.get("rank_rel_tol")

    @property
    def residual_tol(self) -> float:
        return self.get("residual_tol")

    @property
    def cocycle_tol(self) -> float:
        return self.get("cocycle_tol")

    @property
    def seed(self) -> int:
        return self.get("seed")

    @property
    def estimator_restarts(self) -> int:
        return self.get("estimator_restarts")


# Singleton instance for easy import
settings_module = SettingsModule()
