"""Exception hierarchy shared across the package."""


class SqspError(Exception):
    """Base class for all library errors."""


class OperandOutOfRange(SqspError):
    pass


class DuplicateOperand(SqspError):
    pass


class NotUnitary(SqspError):
    pass


class UnsupportedGate(SqspError):
    pass


class ScratchUnavailable(SqspError):
    pass


class EmptyControls(SqspError):
    pass


class SourceInTargets(SqspError):
    pass


class InsufficientScratch(SqspError):
    pass


class NotNormalized(SqspError):
    pass


class DuplicateBasis(SqspError):
    pass


class BadWidth(SqspError):
    pass


class ZeroAmplitude(SqspError):
    pass


class TooManyTargets(SqspError):
    pass


class NonPermutationGate(SqspError):
    pass


class QasmParseError(SqspError):
    pass


class BudgetTooSmall(SqspError):
    """Raised when the ancilla budget cannot fit any feasible plan."""

    def __init__(self, message: str, m_min: int):
        super().__init__(message)
        self.m_min = m_min
