"""
Error hierarchy for the contraction_models library.

Library functions raise these; management commands map them to exit codes
through the ``exit_code`` class attribute.
"""


class ContractionModelError(Exception):
    """Base class for all library errors"""

    exit_code = 4


class DimensionMismatch(ContractionModelError):
    """Shapes of the inputs disagree"""

    exit_code = 2


class FileFormatError(ContractionModelError):
    """An operator or marked-disc file cannot be parsed"""

    exit_code = 2


class GridError(ContractionModelError):
    """A sample grid is missing required points or is inconsistent"""

    exit_code = 2


class OutsideDisc(ContractionModelError):
    """A spectral parameter has modulus >= 1"""

    exit_code = 2


class NotAContraction(ContractionModelError):
    """The operator norm exceeds 1 + tol"""

    exit_code = 3


class NotCompletelyNonUnitary(ContractionModelError):
    """The contraction has a nonzero unitary part"""

    exit_code = 3


class NotIsotropic(ContractionModelError):
    pass


class NotPositiveDefinite(ContractionModelError):
    pass


class NotAGraph(ContractionModelError):
    """The transformed subspace is not a graph over the polarization"""

    pass


class NotStrictContraction(ContractionModelError):
    """A parameter that must satisfy ||B|| < 1 does not"""

    pass


class ConfluentPointUnsupported(ContractionModelError):
    """A confluent kernel value was requested for a sampled evaluator"""

    pass


class SingularSystem(ContractionModelError):
    pass


class SymplecticError(ContractionModelError):
    """A symplectic construction lost rank it should have kept"""

    pass


class ModelError(ContractionModelError):
    """A synthesized model operator fails its own invariants"""

    pass


class ModelNotFinite(ContractionModelError):
    """Gram rank keeps growing under grid refinement"""

    exit_code = 5
