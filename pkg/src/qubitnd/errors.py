"""Exception hierarchy for qubitnd."""


class QubitNDError(ValueError):
    """Base class for all library errors."""


class NotPsd(QubitNDError):
    pass


class OutcomeOutOfRange(QubitNDError, IndexError):
    pass


class InvalidPartition(QubitNDError):
    pass


class InvalidPovm(QubitNDError):
    pass


class ShapeMismatch(QubitNDError):
    pass


class DomainError(QubitNDError):
    pass


class TargetOutsideRegion(QubitNDError):
    pass


class OutsideLudersRegion(QubitNDError):
    pass


class BudgetTooSmall(QubitNDError):
    pass


class DegenerateDraw(QubitNDError):
    pass


class SingularMean(QubitNDError):
    pass


class UnsupportedDot(QubitNDError):
    pass


class ParseError(QubitNDError):
    """Malformed input file; ``field`` names the offending location."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
