"""
Django settings for the contraction_models project.

Django is used as an application shell: settings, the app registry, logging
configuration and management commands. There is no web surface and no database.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
import sys
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    "DJANGO_SECRET_KEY",
    "django-insecure-k3#v!t9q@w2m%z8p^x4r&c6n*b1y$h7j(d5f)g0s-l=u+e_a[o]i",
)

DEBUG = os.environ.get("DJANGO_DEBUG", "true").lower() == "true"

ALLOWED_HOSTS: list[str] = []


# Application definition

INSTALLED_APPS = [
    "core",
    "utils",
]

# Nothing is persisted; commands read and write JSON files directly.
DATABASES: dict[str, dict[str, str]] = {}

TIME_ZONE = "UTC"

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Numerical defaults for analysis, verification and synthesis.
# Tolerance, grid and seed keys can be overridden per run by command flags.
CONTRACTION_MODELS = {
    "TOLERANCE": 1e-9,
    "RANK_TOLERANCE": 1e-8,
    "GRID_RADII": [0.3, 0.6],
    "GRID_ANGLES": 8,
    "RMAX": 0.85,
    "JITTER": 1e-3,
    "SEED": int(os.environ.get("CONTRACTION_MODELS_SEED", "0")),
    "VALIDATION_RADIUS": 0.99,
    "VALIDATION_POINTS": 64,
    "OUTPUT_ZERO_MINUS": "drop",
}


# Logging configuration
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
            "stream": "ext://sys.stderr",
        },
        "file": {
            "class": "logging.FileHandler",
            "filename": str(BASE_DIR / "contraction_models.log"),
            "formatter": "verbose",
            "delay": True,
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console", "file"],
            "level": "WARNING",
            "propagate": False,
        },
        "core": {
            "handlers": ["console", "file"],
            "level": os.environ.get("CONTRACTION_MODELS_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
        "utils": {
            "handlers": ["console", "file"],
            "level": "INFO",
            "propagate": False,
        },
        "config": {
            "handlers": ["file"],
            "level": "INFO",
            "propagate": False,
        },
    },
}

# Test configuration
if "test" in sys.argv or "pytest" in sys.modules:
    # Disable logging during tests to reduce noise
    LOGGING_CONFIG = None
    import logging

    logging.disable(logging.CRITICAL)
