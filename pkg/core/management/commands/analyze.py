import logging
from typing import Any

from core.contraction import canonical_quadruple, cnu_split, defect_analysis, theta, weyl_function
from core.fileio import OperatorFile
from core.management.base import ContractionModelCommand

logger = logging.getLogger(__name__)


class Command(ContractionModelCommand):
    help = "Analyze a contraction: defect indices, frames, ||t||, c.n.u. verdict and Theta/B samples"

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument("path", help="Operator file (JSON)")
        parser.add_argument(
            "--point",
            nargs=2,
            type=float,
            action="append",
            default=[],
            metavar=("RE", "IM"),
            help="Extra plus-disc point at which to report Theta and B (repeatable)",
        )
        super().add_arguments(parser)

    def run(self, **options: Any) -> dict[str, Any]:
        operator = OperatorFile.load(options["path"], self.tol)
        an = defect_analysis(operator.matrix, self.tol)
        n_plus, n_minus = an.indices
        report: dict[str, Any] = {
            "dim": an.n,
            "indices": [n_plus, n_minus],
            "cnu": an.is_cnu,
            "unitary_part_dim": an.unitary_part.rank,
            "t_norm": an.t_norm,
            "t": an.t,
            "frames": {"K_perp": an.V_rest, "K_star_perp": an.U_rest},
        }
        if n_plus == 0:
            report["samples"] = []
            report["samples_skipped"] = "no defect: T is unitary"
            return report

        cnu_an = an
        if not an.is_cnu:
            # Theta and B see only the c.n.u. part, which carries all of the defect
            _, cnu = cnu_split(an.T, self.tol)
            cnu_an = defect_analysis(cnu.frame.conj().T @ an.T @ cnu.frame, self.tol)
            logger.info(f"Sampling the c.n.u. part of dimension {cnu_an.n}")
        report["samples_from"] = "whole" if cnu_an is an else "cnu_part"

        quadruple = canonical_quadruple(cnu_an)
        points = [p for p in self.grid(options) if p.in_plus]
        extra = [complex(re, im) for re, im in options["point"]]
        rows = []
        for lam in [p.coord for p in points] + extra:
            rows.append({"lam": lam, "theta": theta(cnu_an, lam), "weyl": weyl_function(cnu_an, quadruple, lam)})
        report["samples"] = rows
        logger.info(f"Analyzed {options['path']}: {len(rows)} samples")
        return report
