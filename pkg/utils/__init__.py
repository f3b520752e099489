"""
Numerical helpers shared across the project (frames, ranks, matrix roots).
"""

default_app_config = "utils.apps.UtilsConfig"
