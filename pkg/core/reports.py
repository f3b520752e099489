"""
Deterministic JSON rendering for command reports.

Floats are rounded to 12 significant digits, complex numbers become [re, im]
pairs and keys are sorted, so the same inputs and seed give the same bytes.
"""

import json
import math
from enum import Enum
from typing import Any

import numpy as np

from .discs import DiscPoint

SIGNIFICANT_DIGITS = 12


def round_float(value: float) -> float:
    if not math.isfinite(value):
        return value
    if value == 0.0:
        return 0.0
    rounded = float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    return 0.0 if rounded == 0.0 else rounded


def to_jsonable(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, DiscPoint):
        return {"disc": value.disc.value, "coord": to_jsonable(value.coord)}
    if isinstance(value, bool | np.bool_):
        return bool(value)
    if isinstance(value, int | np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        return round_float(float(value))
    if isinstance(value, complex | np.complexfloating):
        return [round_float(float(value.real)), round_float(float(value.imag))]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()] if value.ndim else to_jsonable(value.item())
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [to_jsonable(item) for item in value]
    return value


def render(report: dict[str, Any]) -> str:
    # allow_nan stays on: an infinite deviation is a legitimate report value
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2)


def check(name: str, residual: float, tol: float) -> dict[str, Any]:
    """One verification line: the residual and whether it is within tol."""
    return {"name": name, "residual": residual, "tol": tol, "passed": bool(residual <= tol)}
