import logging
from typing import Any

import numpy as np

from core.contraction import (
    BoundaryQuadruple,
    ContractionAnalysis,
    canonical_quadruple,
    defect_analysis,
    green_residual,
    primed_quadruple,
    theta,
    weyl_function,
    weyl_realization,
)
from core.discs import DiscPoint, confluent
from core.fileio import OperatorFile, load_mark
from core.kernel import gram_assemble, kernel_block, kernel_oracle
from core.management.base import ContractionModelCommand
from core.model import hat_section, verify_model
from core.reports import check

logger = logging.getLogger(__name__)

GREEN_SAMPLES = 16


class Command(ContractionModelCommand):
    help = "Run the numerical verification suite for a c.n.u. contraction"

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument("path", help="Operator file (JSON)")
        parser.add_argument(
            "--mark",
            default="canonical",
            help="'canonical' to use t, or a mark file holding the boundary parameter",
        )
        super().add_arguments(parser)

    def run(self, **options: Any) -> dict[str, Any]:
        operator = OperatorFile.load(options["path"], self.tol)
        an = defect_analysis(operator.matrix, self.tol)
        an.require_cnu()
        tol = self.tol
        grid = self.grid(options)
        canonical = canonical_quadruple(an)
        primed = primed_quadruple(an)
        if options["mark"] == "canonical":
            mark = an.t
        else:
            mark = load_mark(options["mark"], (an.n_minus, an.n_plus))

        checks = [
            check("green_canonical", self._green(an, canonical), tol),
            check("green_primed", self._green(an, primed), tol),
            check("primed_weyl_plus_theta", self._primed_vs_theta(an, primed, grid), tol),
        ]
        checks.extend(self._kernel_routes(an, canonical, grid, tol))

        model = verify_model(an, canonical, mark, grid, seed=self.seed)
        checks.append(check("boundary_identities", model.max_residual_t1, tol))
        checks.append(check("model_identity", model.max_residual_model, tol))

        gram = gram_assemble(weyl_realization(an, canonical), grid)
        negativity = max(0.0, -gram.min_eigenvalue) / max(gram.norm, 1.0)
        checks.append(check("gram_psd", negativity, tol))
        checks.append(check("gram_rank", float(abs(gram.rank - an.n)), 0.0))

        report = {
            "path": str(options["path"]),
            "indices": list(an.indices),
            "mark": "canonical" if options["mark"] == "canonical" else str(options["mark"]),
            "points": len(grid),
            "seed": self.seed,
            "checks": checks,
            "passed": all(c["passed"] for c in checks),
        }
        failed = [c["name"] for c in checks if not c["passed"]]
        if failed:
            logger.warning(f"Verification failed: {', '.join(failed)}")
            self.emit_and_fail(report, f"checks failed: {', '.join(failed)}")
        return report

    def _green(self, an: ContractionAnalysis, quadruple: BoundaryQuadruple) -> float:
        rng = np.random.default_rng(self.seed)
        rank = an.ATperp.rank
        worst = 0.0
        for _ in range(GREEN_SAMPLES):
            coords = rng.standard_normal((rank, 2)) + 1j * rng.standard_normal((rank, 2))
            a, b = an.ATperp.frame @ coords[:, 0], an.ATperp.frame @ coords[:, 1]
            worst = max(worst, green_residual(an, quadruple, a, b))
        return worst

    def _primed_vs_theta(self, an: ContractionAnalysis, primed: BoundaryQuadruple, grid: list[DiscPoint]) -> float:
        return max(
            float(np.linalg.norm(weyl_function(an, primed, p) + theta(an, p.coord), 2))
            for p in grid
            if p.in_plus
        )

    def _kernel_routes(
        self, an: ContractionAnalysis, quadruple: BoundaryQuadruple, grid: list[DiscPoint], tol: float
    ) -> list[dict[str, Any]]:
        B = weyl_realization(an, quadruple)
        sections = hat_section(an, quadruple, np.eye(an.n), grid)
        projection = 0.0
        inner_product = 0.0
        for p, row in zip(grid, sections.values, strict=True):
            for q, column in zip(grid, sections.values, strict=True):
                table = kernel_block(B, p, q)
                inner_product = max(inner_product, float(np.max(np.abs(table - row @ column.conj().T))))
                if not confluent(p, q):
                    oracle = kernel_oracle(an, p, q, "projection", quadruple)
                    projection = max(projection, float(np.max(np.abs(table - oracle))))
        return [
            check("kernel_projection_route", projection, tol),
            check("kernel_inner_product_route", inner_product, tol),
        ]
