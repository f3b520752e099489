"""
JSON files for operators, marked discs and marks.

Complex scalars are written as [re, im] pairs and matrices as row-major
nested lists of such pairs:

    operator file : {"dim": n, "matrix": [[[re, im], ...], ...]}
    disc file     : {"n_plus", "n_minus", "state_dim", "A", "B_in", "C", "D", "mark"}
    mark file     : {"mark": [[[re, im], ...], ...]}
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from utils.linalg import spectral_norm

from .conf import get_setting
from .exceptions import ContractionModelError, FileFormatError, NotAContraction
from .model import MarkedDisc
from .realization import SchurRealization

logger = logging.getLogger(__name__)


def encode_matrix(matrix: np.ndarray) -> list[list[list[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix, dtype=complex)]


def decode_matrix(data: Any, shape: tuple[int, int], name: str) -> np.ndarray:
    rows, cols = shape
    if not isinstance(data, list) or len(data) != rows:
        raise FileFormatError(f"{name}: expected {rows} rows")
    matrix = np.zeros(shape, dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise FileFormatError(f"{name}: row {i} must have {cols} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, int | float) and not isinstance(x, bool) for x in entry)
            ):
                raise FileFormatError(f"{name}[{i}][{j}] must be a [re, im] pair of numbers")
            matrix[i, j] = complex(entry[0], entry[1])
    return matrix


def _shape_of(data: Any, name: str) -> tuple[int, int]:
    if not isinstance(data, list) or not data:
        raise FileFormatError(f"{name} must be a non-empty list of rows")
    first = data[0]
    if not isinstance(first, list):
        raise FileFormatError(f"{name} rows must be lists")
    return len(data), len(first)


def _read_json(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as e:
        raise FileFormatError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise FileFormatError(f"{path} must hold a JSON object")
    return data


def _int_field(data: dict[str, Any], key: str, minimum: int = 0) -> int:
    value = data.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise FileFormatError(f"'{key}' must be an integer >= {minimum}")
    return value


@dataclass(frozen=True, eq=False)
class OperatorFile:
    dim: int
    matrix: np.ndarray

    @classmethod
    def load(cls, path: str | Path, tol: float | None = None) -> "OperatorFile":
        tol = float(get_setting("TOLERANCE") if tol is None else tol)
        data = _read_json(path)
        dim = _int_field(data, "dim", 1)
        matrix = decode_matrix(data.get("matrix"), (dim, dim), "matrix")
        norm = spectral_norm(matrix)
        if norm > 1.0 + tol:
            raise NotAContraction(f"||T|| = {norm:.12f} exceeds 1 in {path}")
        logger.debug(f"Loaded {dim}x{dim} operator from {path}")
        return cls(dim, matrix)

    def to_dict(self) -> dict[str, Any]:
        return {"dim": self.dim, "matrix": encode_matrix(self.matrix)}

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True, eq=False)
class MarkedDiscFile:
    disc: MarkedDisc

    @property
    def realization(self) -> SchurRealization:
        return self.disc.schur

    @classmethod
    def load(cls, path: str | Path) -> "MarkedDiscFile":
        data = _read_json(path)
        n_plus = _int_field(data, "n_plus", 1)
        n_minus = _int_field(data, "n_minus", 1)
        s = _int_field(data, "state_dim")

        def block(key: str, shape: tuple[int, int]) -> np.ndarray:
            if 0 in shape:
                # Empty blocks may be written as [] or as rows of []
                return np.zeros(shape, dtype=complex)
            return decode_matrix(data.get(key), shape, key)

        try:
            realization = SchurRealization(
                block("A", (s, s)),
                block("B_in", (s, n_plus)),
                block("C", (n_minus, s)),
                block("D", (n_minus, n_plus)),
            )
            disc = MarkedDisc(realization, block("mark", (n_minus, n_plus)))
        except FileFormatError:
            raise
        except ContractionModelError as e:
            raise FileFormatError(f"{path}: {e}") from e
        logger.debug(f"Loaded marked disc ({n_plus}, {n_minus}) with state dimension {s} from {path}")
        return cls(disc)

    def to_dict(self) -> dict[str, Any]:
        B = self.disc.schur
        return {
            "n_plus": B.n_plus,
            "n_minus": B.n_minus,
            "state_dim": B.state_dim,
            "A": encode_matrix(B.A),
            "B_in": encode_matrix(B.B_in),
            "C": encode_matrix(B.C),
            "D": encode_matrix(B.D),
            "mark": encode_matrix(self.disc.mark),
        }

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_mark(path: str | Path, shape: tuple[int, int]) -> np.ndarray:
    data = _read_json(path)
    if "mark" not in data:
        raise FileFormatError(f"{path} has no 'mark' entry")
    return decode_matrix(data["mark"], shape, "mark")


def load_matrix(path: str | Path) -> np.ndarray:
    """Matrix of an operator file without the contraction check (for round trips)."""
    data = _read_json(path)
    if "matrix" in data:
        return decode_matrix(data["matrix"], _shape_of(data["matrix"], "matrix"), "matrix")
    raise FileFormatError(f"{path} has no 'matrix' entry")
