# type: ignore
"""
Test data factories for random contractions and Schur functions

Factories build their objects from a seed so that every test case is
reproducible. A contraction with spectral radius below one has no unitary
part, which is how the c.n.u. factories guarantee their output.
"""

import factory  # type: ignore[import-untyped]
import numpy as np
from scipy.stats import unitary_group

from .contraction import ContractionAnalysis, canonical_quadruple, defect_analysis, weyl_realization
from .model import MarkedDisc
from .realization import SchurRealization


def random_cnu_matrix(dim: int, seed: int, unit_singular_values: int = 0, max_singular_value: float = 0.9):
    """U diag(s) W with s in [0, max_singular_value) apart from the requested unit values."""
    rng = np.random.default_rng(seed)
    while True:
        left = unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.exp(2j * np.pi * rng.random()) * np.eye(1)
        right = unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.eye(1)
        singular = rng.uniform(0.0, max_singular_value, size=dim)
        singular[: min(unit_singular_values, dim - 1)] = 1.0
        T = left @ np.diag(singular) @ right
        # Rejection keeps the spectrum well inside the disc
        if np.max(np.abs(np.linalg.eigvals(T))) < 0.95:
            return T


class CnuContractionFactory(factory.Factory):
    """Factory for ContractionAnalysis of a random c.n.u. contraction"""

    class Meta:
        model = ContractionAnalysis

    dim = 3
    seed = factory.Sequence(lambda n: n)
    unit_singular_values = 0

    @classmethod
    def _create(cls, model_class, dim, seed, unit_singular_values):
        return defect_analysis(random_cnu_matrix(dim, seed, unit_singular_values))

    @classmethod
    def _build(cls, model_class, **kwargs):
        return cls._create(model_class, **kwargs)


class SchurRealizationFactory(factory.Factory):
    """Factory for the canonical Weyl function of a random c.n.u. contraction"""

    class Meta:
        model = SchurRealization

    dim = 3
    seed = factory.Sequence(lambda n: 1000 + n)
    unit_singular_values = 1

    @classmethod
    def _create(cls, model_class, dim, seed, unit_singular_values):
        an = defect_analysis(random_cnu_matrix(dim, seed, unit_singular_values))
        return weyl_realization(an, canonical_quadruple(an))

    @classmethod
    def _build(cls, model_class, **kwargs):
        return cls._create(model_class, **kwargs)


class MarkedDiscFactory(factory.Factory):
    """Factory for the marked disc (B, t) of a random c.n.u. contraction"""

    class Meta:
        model = MarkedDisc

    analysis = factory.SubFactory(CnuContractionFactory)

    @classmethod
    def _create(cls, model_class, analysis):
        return model_class(weyl_realization(analysis, canonical_quadruple(analysis)), analysis.t)

    @classmethod
    def _build(cls, model_class, **kwargs):
        return cls._create(model_class, **kwargs)
