"""
Configuration validation for the contraction_models project

Checks the numerical defaults in CONTRACTION_MODELS and the logging setup at
startup, so a bad tolerance or grid radius fails loudly instead of producing
quietly wrong certificates.
"""

import logging
from collections.abc import Callable
from typing import Any

from django.conf import settings

logger = logging.getLogger(__name__)


class ConfigurationValidationError(Exception):
    """Raised when configuration validation fails"""

    pass


def _tolerance(value: float) -> None:
    if not 0.0 < value <= 1e-2:
        raise ConfigurationValidationError(f"must lie in (0, 1e-2], got {value}")


def _radius_below_one(value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ConfigurationValidationError(f"must lie in (0, 1), got {value}")


def _grid_radii(value: list) -> None:
    if not value:
        raise ConfigurationValidationError("must contain at least one radius")
    rmax = settings.CONTRACTION_MODELS.get("RMAX", 0.85)
    for radius in value:
        if not isinstance(radius, int | float) or not 0.0 < radius <= rmax:
            raise ConfigurationValidationError(
                f"radius {radius!r} must lie in (0, RMAX={rmax}]"
            )


def _positive_int(value: int) -> None:
    if value < 1:
        raise ConfigurationValidationError(f"must be at least 1, got {value}")


def _non_negative(value: float) -> None:
    if value < 0:
        raise ConfigurationValidationError(f"must be non-negative, got {value}")


def _seed(value: int) -> None:
    if value < 0:
        raise ConfigurationValidationError(f"must be a non-negative integer, got {value}")


def _zero_minus_mode(value: str) -> None:
    if value not in ("drop", "limit"):
        raise ConfigurationValidationError(f"must be 'drop' or 'limit', got {value!r}")


REQUIRED_KEYS: dict[str, tuple[type | tuple[type, ...], Callable[[Any], None]]] = {
    "TOLERANCE": ((int, float), _tolerance),
    "RANK_TOLERANCE": ((int, float), _tolerance),
    "GRID_RADII": (list, _grid_radii),
    "GRID_ANGLES": (int, _positive_int),
    "RMAX": ((int, float), _radius_below_one),
    "JITTER": ((int, float), _non_negative),
    "SEED": (int, _seed),
    "VALIDATION_RADIUS": ((int, float), _radius_below_one),
    "VALIDATION_POINTS": (int, _positive_int),
    "OUTPUT_ZERO_MINUS": (str, _zero_minus_mode),
}


def validate_configuration() -> None:
    """
    Validate CONTRACTION_MODELS and LOGGING at startup.

    Raises:
        ConfigurationValidationError: If any critical setting is invalid
    """
    logger.info("Starting configuration validation...")

    validation_errors: list[str] = []
    validation_warnings: list[str] = []

    numerics = getattr(settings, "CONTRACTION_MODELS", None)
    if not isinstance(numerics, dict):
        raise ConfigurationValidationError("CONTRACTION_MODELS must be a dict")

    for key, (expected_type, validator) in REQUIRED_KEYS.items():
        if key not in numerics:
            validation_warnings.append(f"CONTRACTION_MODELS[{key!r}] not set, default used")
            continue
        try:
            _validate_value(key, numerics[key], expected_type, validator)
            logger.debug(f"✓ {key} validation passed")
        except ConfigurationValidationError as e:
            validation_errors.append(str(e))
            logger.error(f"✗ {key} validation failed: {e}")

    unknown = sorted(set(numerics) - set(REQUIRED_KEYS))
    for key in unknown:
        validation_warnings.append(f"CONTRACTION_MODELS[{key!r}] is not a known key")

    try:
        _validate_logging_config(getattr(settings, "LOGGING", {}))
    except ConfigurationValidationError as e:
        validation_warnings.append(str(e))

    if validation_errors:
        error_msg = (
            f"Configuration validation failed with {len(validation_errors)} critical errors:\n"
            + "\n".join(f"  - {error}" for error in validation_errors)
        )
        logger.error(error_msg)
        raise ConfigurationValidationError(error_msg)

    if validation_warnings:
        warning_msg = (
            f"Configuration validation completed with {len(validation_warnings)} warnings:\n"
            + "\n".join(f"  - {warning}" for warning in validation_warnings)
        )
        logger.warning(warning_msg)

    logger.info(
        f"✓ Configuration validation completed successfully "
        f"({len(validation_warnings)} warnings)"
    )


def _validate_value(
    key: str,
    value: Any,
    expected_type: type | tuple[type, ...],
    validator: Callable[[Any], None],
) -> None:
    """Validate a single CONTRACTION_MODELS entry"""
    # bool is an int subclass and never a valid numeric setting here
    if isinstance(value, bool) or not isinstance(value, expected_type):
        raise ConfigurationValidationError(
            f"{key} has unexpected type {type(value).__name__}"
        )
    try:
        validator(value)
    except ConfigurationValidationError as e:
        raise ConfigurationValidationError(f"{key} {e}") from e


def _validate_logging_config(logging_config: dict) -> None:
    """Validate logging configuration"""
    if "version" not in logging_config:
        raise ConfigurationValidationError(
            "LOGGING configuration must include 'version'"
        )

    if logging_config.get("version") != 1:
        raise ConfigurationValidationError("LOGGING configuration version must be 1")

    if "core" not in logging_config.get("loggers", {}):
        raise ConfigurationValidationError("LOGGING has no 'core' logger")


def get_configuration_summary() -> dict:
    """
    Summary of the active numerical configuration for the startup log.
    """
    numerics = getattr(settings, "CONTRACTION_MODELS", {})
    return {
        "debug": getattr(settings, "DEBUG", None),
        "tolerance": numerics.get("TOLERANCE"),
        "rank_tolerance": numerics.get("RANK_TOLERANCE"),
        "grid_radii": list(numerics.get("GRID_RADII", [])),
        "grid_angles": numerics.get("GRID_ANGLES"),
        "rmax": numerics.get("RMAX"),
        "seed": numerics.get("SEED"),
        "output_zero_minus": numerics.get("OUTPUT_ZERO_MINUS"),
        "installed_apps_count": len(getattr(settings, "INSTALLED_APPS", [])),
    }
