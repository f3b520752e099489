import logging
from typing import Any

from core.contraction import (
    canonical_quadruple,
    defect_analysis,
    primed_quadruple,
    theta,
    weyl_function,
    weyl_realization,
)
from core.fileio import OperatorFile
from core.kernel import gram_assemble
from core.management.base import ContractionModelCommand

logger = logging.getLogger(__name__)


class Command(ContractionModelCommand):
    help = "Evaluate Theta_T, the Weyl function B or the kernel Gram matrix on the sample grid"

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument("path", help="Operator file (JSON)")
        parser.add_argument("--what", choices=["theta", "weyl", "kernel"], default="weyl")
        parser.add_argument(
            "--quadruple",
            choices=["canonical", "primed"],
            default="canonical",
            help="Boundary quadruple for B and the kernel",
        )
        super().add_arguments(parser)

    def run(self, **options: Any) -> dict[str, Any]:
        operator = OperatorFile.load(options["path"], self.tol)
        an = defect_analysis(operator.matrix, self.tol)
        an.require_cnu()
        grid = self.grid(options)
        what = options["what"]
        report: dict[str, Any] = {"what": what, "indices": list(an.indices)}

        if what == "theta":
            plus = [p for p in grid if p.in_plus]
            report["samples"] = [{"point": str(p), "lam": p.coord, "value": theta(an, p.coord)} for p in plus]
            return report

        quadruple = canonical_quadruple(an) if options["quadruple"] == "canonical" else primed_quadruple(an)
        report["quadruple"] = quadruple.name
        report["mark"] = quadruple.mark
        if what == "weyl":
            # Minus-disc values are B(conj lam)*
            report["samples"] = [
                {"point": str(p), "lam": p.coord, "value": weyl_function(an, quadruple, p)} for p in grid
            ]
            return report

        gram = gram_assemble(weyl_realization(an, quadruple), grid)
        report.update(
            {
                "points": [str(p) for p in grid],
                "fiber_dims": list(gram.fiber_dims),
                "rank": gram.rank,
                "min_eigenvalue": gram.min_eigenvalue,
                "norm": gram.norm,
                "psd": gram.is_psd(self.tol),
                "matrix": gram.blocks,
            }
        )
        logger.info(f"Gram matrix on {len(grid)} points has rank {gram.rank}")
        return report
