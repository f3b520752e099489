import logging
from typing import Any

import numpy as np
import scipy.linalg

from core.fileio import MarkedDiscFile, OperatorFile, load_matrix
from core.management.base import ContractionModelCommand
from core.model import equivalence_check, synthesize

logger = logging.getLogger(__name__)


class Command(ContractionModelCommand):
    help = "Synthesize the model contraction of a marked disc"

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument("disc_path", help="Marked-disc file (JSON)")
        parser.add_argument("--output", default=None, help="Write the synthesized operator file here")
        parser.add_argument(
            "--roundtrip",
            default=None,
            metavar="ORIGINAL",
            help="Operator file to compare against with the unitary-equivalence check",
        )
        parser.add_argument(
            "--equivalence-tol",
            type=float,
            default=1e-6,
            help="Tolerance of the round-trip equivalence check",
        )
        super().add_arguments(parser)

    def run(self, **options: Any) -> dict[str, Any]:
        disc = MarkedDiscFile.load(options["disc_path"]).disc
        operator = synthesize(
            disc,
            tol=self.tol,
            zero_minus=self.zero_minus_mode(options),
            radii=options["grid_radii"],
            angles=options["grid_angles"],
            seed=self.seed,
            rmax=options["rmax"],
        )
        report: dict[str, Any] = {
            "dim": operator.dim,
            "gram_rank": operator.gram_rank,
            "refined_rank": operator.refined_rank,
            "residual": operator.residual,
            "norm": operator.norm,
            "singular_values": scipy.linalg.svdvals(operator.matrix) if operator.dim else np.zeros(0),
            "matrix": operator.matrix,
        }
        if options["output"]:
            OperatorFile(operator.dim, operator.matrix).dump(options["output"])
            report["output"] = str(options["output"])
            logger.info(f"Wrote synthesized operator to {options['output']}")

        if options["roundtrip"]:
            original = load_matrix(options["roundtrip"])
            result = equivalence_check(operator.matrix, original, options["equivalence_tol"])
            report["roundtrip"] = {
                "original": str(options["roundtrip"]),
                "verdict": result.verdict,
                "singular_value_deviation": result.singular_value_deviation,
                "spectrum_deviation": result.spectrum_deviation,
                "eigenvalue_deviation": result.eigenvalue_deviation,
                "trace_word_deviation": result.trace_word_deviation,
                "words_checked": result.words_checked,
            }
        return report
