"""
Points of the two unit discs and sample grids over them.

The outer disc is identified with a second copy of the unit disc through
lambda -> 1/lambda, so every point carries a coordinate of modulus < 1 and a
tag saying which copy it lives in. The two origins 0+ and 0- are distinct.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .conf import get_setting
from .exceptions import GridError, OutsideDisc

logger = logging.getLogger(__name__)


class Disc(Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def other(self) -> "Disc":
        return Disc.MINUS if self is Disc.PLUS else Disc.PLUS


@dataclass(frozen=True)
class DiscPoint:
    coord: complex
    disc: Disc

    def __post_init__(self) -> None:
        object.__setattr__(self, "coord", complex(self.coord))
        if not abs(self.coord) < 1.0:
            raise OutsideDisc(f"|{self.coord}| >= 1 is outside the unit disc")

    @classmethod
    def plus(cls, coord: complex) -> "DiscPoint":
        return cls(coord, Disc.PLUS)

    @classmethod
    def minus(cls, coord: complex) -> "DiscPoint":
        return cls(coord, Disc.MINUS)

    @property
    def in_plus(self) -> bool:
        return self.disc is Disc.PLUS

    @property
    def is_origin(self) -> bool:
        return self.coord == 0

    @property
    def is_zero_minus(self) -> bool:
        return self.disc is Disc.MINUS and self.coord == 0

    def mirror(self) -> "DiscPoint":
        """The point with conjugated coordinate in the other disc."""
        return DiscPoint(self.coord.conjugate(), self.disc.other)

    def label(self) -> str:
        sign = "+" if self.in_plus else "-"
        return f"{self.coord.real:+.6f}{self.coord.imag:+.6f}j@{sign}"

    def __str__(self) -> str:
        if self.is_origin:
            return "0+" if self.in_plus else "0-"
        return self.label()


ZERO_PLUS = DiscPoint(0j, Disc.PLUS)
ZERO_MINUS = DiscPoint(0j, Disc.MINUS)


def confluent(p: DiscPoint, q: DiscPoint, tol: float = 1e-14) -> bool:
    """True when the cross-disc kernel denominator lambda - conj(mu) vanishes."""
    if p.disc is q.disc:
        return False
    return abs(p.coord - q.coord.conjugate()) <= tol


def make_grid(
    radii: Sequence[float] | None = None,
    angles: int | None = None,
    seed: int | None = None,
    jitter: float | None = None,
    rmax: float | None = None,
    include_origins: bool = True,
) -> list[DiscPoint]:
    """
    Default sample grid: ``angles`` points on each radius in each disc plus 0+ and 0-.

    Minus-disc angles are offset by a quarter step so that no minus point is the
    conjugate of a plus point; the seeded jitter then perturbs radii and angles.
    """
    radii = list(get_setting("GRID_RADII") if radii is None else radii)
    angles = int(get_setting("GRID_ANGLES") if angles is None else angles)
    seed = int(get_setting("SEED") if seed is None else seed)
    jitter = float(get_setting("JITTER") if jitter is None else jitter)
    rmax = float(get_setting("RMAX") if rmax is None else rmax)

    if not radii:
        raise GridError("grid needs at least one radius")
    if angles < 1:
        raise GridError(f"grid needs at least one angle, got {angles}")
    for radius in radii:
        if not 0.0 < radius <= rmax:
            raise GridError(f"radius {radius} outside (0, rmax={rmax}]")

    rng = np.random.default_rng(seed)
    points: list[DiscPoint] = []
    if include_origins:
        points.extend([ZERO_PLUS, ZERO_MINUS])
    for disc, offset in ((Disc.PLUS, 0.0), (Disc.MINUS, 0.25)):
        for radius in radii:
            for k in range(angles):
                theta = 2.0 * math.pi * (k + offset) / angles
                dr, dtheta = rng.uniform(-jitter, jitter, size=2)
                r = min(max(radius + dr, 1e-6), rmax)
                points.append(DiscPoint(r * complex(math.cos(theta + dtheta), math.sin(theta + dtheta)), disc))

    logger.debug(f"Built grid with {len(points)} points (seed={seed})")
    return points


def refine_grid(
    radii: Sequence[float], angles: int, rmax: float | None = None
) -> tuple[list[float], int]:
    """Grid parameters with one extra radius and doubled angular density."""
    rmax = float(get_setting("RMAX") if rmax is None else rmax)
    ordered = sorted(radii)
    extra = 0.5 * ordered[0]
    if ordered[-1] < rmax:
        extra = 0.5 * (ordered[-1] + rmax)
    return sorted({*ordered, extra}), 2 * angles


def require_zero_minus(grid: Sequence[DiscPoint]) -> int:
    """Index of 0- in ``grid``; raises GridError when it is missing."""
    for index, point in enumerate(grid):
        if point.is_zero_minus:
            return index
    raise GridError("grid must contain the point 0-")


def split_by_disc(grid: Sequence[DiscPoint]) -> tuple[list[int], list[int]]:
    plus = [i for i, p in enumerate(grid) if p.in_plus]
    minus = [i for i, p in enumerate(grid) if not p.in_plus]
    return plus, minus
