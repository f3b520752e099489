"""Access to the CONTRACTION_MODELS settings with documented fallbacks."""

from typing import Any

from django.conf import settings

DEFAULTS: dict[str, Any] = {
    "TOLERANCE": 1e-9,
    "RANK_TOLERANCE": 1e-8,
    "GRID_RADII": [0.3, 0.6],
    "GRID_ANGLES": 8,
    "RMAX": 0.85,
    "JITTER": 1e-3,
    "SEED": 0,
    "VALIDATION_RADIUS": 0.99,
    "VALIDATION_POINTS": 64,
    "OUTPUT_ZERO_MINUS": "drop",
}


def get_setting(key: str) -> Any:
    """Return CONTRACTION_MODELS[key], falling back to the built-in default."""
    if key not in DEFAULTS:
        raise KeyError(f"Unknown CONTRACTION_MODELS key: {key}")
    configured = getattr(settings, "CONTRACTION_MODELS", {}) if settings.configured else {}
    return configured.get(key, DEFAULTS[key])
