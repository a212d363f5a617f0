"""Error and warning types.

Every error carries a stable ``code`` (the class name) and the process exit
status the CLI uses for it: 3 for rejected input, 4 for a failed
precondition or numerical guard.
"""

from __future__ import annotations


class GsisError(Exception):
    exit_code = 4

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.__class__.__name__)
        self.details = details

    @property
    def code(self) -> str:
        return self.__class__.__name__


class ValidationError(GsisError):
    """Input data violates the structural assumptions."""

    exit_code = 3


class PreconditionError(GsisError):
    """Valid input, but an operation's precondition does not hold."""

    exit_code = 4


class NumericalError(GsisError):
    """A numerical guard tripped (convergence, separation, residual)."""

    exit_code = 4


# input validation
class DimensionMismatch(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class NotCommuting(ValidationError):
    pass


class SupportViolation(ValidationError):
    pass


class IsolatedVertex(ValidationError):
    pass


class EmptyShiftSet(ValidationError):
    pass


class InvalidSpec(ValidationError):
    pass


class InvalidGraph(ValidationError):
    pass


class ZeroGenerator(ValidationError):
    pass


# preconditions
class BandOutOfRange(PreconditionError):
    pass


class NegativeBaseFractionalPower(PreconditionError):
    pass


class NotShiftInvariant(PreconditionError):
    pass


class DecompositionMismatch(PreconditionError):
    pass


class RangeEscape(PreconditionError):
    pass


class NotNormalized(PreconditionError):
    pass


class NotPositiveDefinite(PreconditionError):
    pass


class AlphaNotBelowOne(PreconditionError):
    pass


class EmptySet(PreconditionError):
    pass


class ZeroSignal(PreconditionError):
    pass


class PartitionBlowup(PreconditionError):
    pass


# numerical guards
class ConvergenceFailure(NumericalError):
    pass


class AmbiguousClustering(NumericalError):
    pass


class SeparationFailure(NumericalError):
    pass


class WitnessSearchExhausted(NumericalError):
    pass


class ReconstructionResidualExceeded(NumericalError):
    pass


# warnings
class GsisWarning(UserWarning):
    pass


class ZeroCutoffFrequency(GsisWarning):
    pass


class EmptyBand(GsisWarning):
    pass


class ZeroSpace(GsisWarning):
    pass
