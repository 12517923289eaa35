class ScatteringError(Exception):
    """Base class for all errors raised by this package."""


class ResonanceError(ScatteringError):
    """A mode denominator vanished (resonance or severe ill-conditioning)."""


class TruncationError(ScatteringError):
    """A series did not converge below its tail tolerance within the order cap."""


class GeometryError(ScatteringError):
    """Evaluation or source points collide with a scatterer or with each other."""


class InadmissibleError(ScatteringError):
    """The auxiliary ball has k**2 as (or near) a Dirichlet eigenvalue."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InconsistentDataError(ScatteringError):
    """Modulus data violate the triangle inequality beyond tolerance."""
