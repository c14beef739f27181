"""Exception hierarchy shared by all modules."""


class SalemShiftError(Exception):
    """Base class for every error raised by this package."""


class NonSquarefree(SalemShiftError):
    pass


class PrecisionExhausted(SalemShiftError):
    pass


class Inconclusive(SalemShiftError):
    """Root classification is ambiguous at the working precision."""


class NotInvertible(SalemShiftError):
    pass


class NotMonic(SalemShiftError):
    pass


class EmptyResult(SalemShiftError):
    pass


class NotReal(SalemShiftError):
    pass


class CyclotomicInput(SalemShiftError):
    pass


class WindowTooSmall(SalemShiftError):
    pass


class NonIntegerResidual(SalemShiftError):
    pass


class DigitOutOfRange(SalemShiftError):
    pass


class PreconditionViolated(SalemShiftError):
    pass


class NotIrreducible(SalemShiftError):
    """The pruned transition graph has no strongly connected core."""


class InvalidPath(SalemShiftError):
    pass


class NotSalem(SalemShiftError):
    pass


class InsertionFailed(SalemShiftError):
    """No admissible zero count in ``{0, ..., L-1}`` met the d-bound."""

    def __init__(self, message, stage=None, slot=None):
        super().__init__(message)
        self.stage = stage
        self.slot = slot
