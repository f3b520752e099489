"""
Shared plumbing for the contraction-model management commands.

Each command implements ``run(**options)`` returning a report dict; the base
class renders it as deterministic JSON and turns library errors into
CommandError with the error's exit code.
"""

import logging
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from core.conf import get_setting
from core.discs import DiscPoint, make_grid
from core.exceptions import ContractionModelError
from core.model import ZeroMinusMode
from core.reports import render

logger = logging.getLogger(__name__)


class ChecksFailed(ContractionModelError):
    """A verification residual exceeded its tolerance"""

    exit_code = 4


class ContractionModelCommand(BaseCommand):
    # Set by handle() from the shared flags
    tol: float
    seed: int

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument("--tol", type=float, default=None, help="Pass/fail tolerance (default: TOLERANCE setting)")
        parser.add_argument("--grid-radii", type=float, nargs="+", default=None, help="Radii of the sample grid")
        parser.add_argument("--grid-angles", type=int, default=None, help="Angles per radius per disc")
        parser.add_argument("--rmax", type=float, default=None, help="Largest admissible grid radius")
        parser.add_argument(
            "--seed",
            type=int,
            default=None,
            help="Seed for grid jitter and random test vectors (default: CONTRACTION_MODELS_SEED or 0)",
        )
        parser.add_argument(
            "--limit-zero-minus",
            action="store_true",
            help="Evaluate the model operator at 0- by its analytic limit instead of dropping it",
        )

    def grid(self, options: dict[str, Any]) -> list[DiscPoint]:
        return make_grid(options["grid_radii"], options["grid_angles"], self.seed, rmax=options["rmax"])

    def zero_minus_mode(self, options: dict[str, Any]) -> ZeroMinusMode:
        if options["limit_zero_minus"]:
            return ZeroMinusMode.LIMIT
        return ZeroMinusMode(get_setting("OUTPUT_ZERO_MINUS"))

    def run(self, **options: Any) -> dict[str, Any]:
        raise NotImplementedError

    def handle(self, *args: Any, **options: Any) -> None:
        self.tol = float(get_setting("TOLERANCE") if options["tol"] is None else options["tol"])
        self.seed = int(get_setting("SEED") if options["seed"] is None else options["seed"])
        try:
            report = self.run(**options)
        except ChecksFailed as e:
            raise CommandError(str(e), returncode=e.exit_code) from e
        except ContractionModelError as e:
            logger.error(f"{type(e).__name__}: {e}")
            raise CommandError(f"{type(e).__name__}: {e}", returncode=e.exit_code) from e
        self.stdout.write(render(report))

    def emit_and_fail(self, report: dict[str, Any], message: str) -> None:
        """Write the report, then fail with exit code 4."""
        self.stdout.write(render(report))
        raise ChecksFailed(message)
