"""
Exception hierarchy for latclass.

Every failure the library raises on purpose derives from LatticeError, so the
command line can map them to exit code 1 in one place.
"""


class LatticeError(Exception):
    """Base class for all domain errors."""


class DegenerateLatticeError(LatticeError):
    """Gram matrix is not square, not symmetric, or singular."""


class OddLatticeError(LatticeError):
    """An odd diagonal entry was requested in even mode."""


class UnknownFamilyError(LatticeError):
    """A lattice descriptor names no supported family."""


class DependentRowsError(LatticeError):
    """Basis rows are linearly dependent over the rationals."""


class NotSaturatedError(LatticeError):
    """A sublattice required to be primitive is not."""


class ZeroVectorError(LatticeError):
    """Divisibility of the zero vector is undefined."""


class GlueError(LatticeError):
    """Glue subgroup is not isotropic or its projections are not injective."""


class EnumerationBoundError(LatticeError):
    """A finite group or search space exceeds the configured bound."""


class GaussSumError(LatticeError):
    """Gauss sum modulus or phase is off tolerance."""


class SignatureObstructionError(LatticeError):
    """An embedding is impossible for signature reasons."""


class ExtensionObstructionError(LatticeError):
    """An involution does not extend integrally or acts on A_L by neither +1 nor -1."""


class InconsistentInvolutionError(LatticeError):
    """Internal verification of a lattice involution failed."""


class NoMatchingCaseError(LatticeError):
    """No discriminant case matches the (T, S) pair."""


class AmbientMismatchError(LatticeError):
    """Sublattices of different ambient lattices were compared."""


class HyperbolicityError(LatticeError):
    """A lattice required to have signature (1, r-1) does not."""


class IntegralityError(LatticeError):
    """A B-field or twisted Mukai vector is not integral."""


class MukaiVectorError(LatticeError):
    """A Mukai vector is not primitive or its square is below 2."""


class ExpressionSemanticError(LatticeError):
    """A lattice expression parses but describes no even lattice."""


class ExpressionSyntaxError(LatticeError):
    """A lattice expression is malformed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset
