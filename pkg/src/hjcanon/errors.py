"""Exception types shared across the package."""


class HjcError(Exception):
    """Base class for all analysis errors."""


class DeclarationError(HjcError):
    """Reference to an undeclared generator, or a conflicting declaration."""


class GradingError(HjcError):
    """Parity rules violated (odd/even mismatch)."""


class OddDenominatorError(HjcError):
    """Attempted division by an expression containing odd generators."""


class UnsupportedModelError(HjcError):
    """Model outside the supported class (e.g. cubic velocity dependence)."""


class InternalConsistencyError(HjcError):
    """A derived identity that must hold exactly failed to hold."""


class ClosureError(HjcError):
    """Consistency loop did not terminate or produced a contradiction."""


class ModelSyntaxError(HjcError):
    """Syntax or resolution error in a model/transformation file."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class DimensionError(HjcError):
    """Mismatched Grassmann algebra sizes."""


class DomainError(HjcError):
    """Numeric argument outside the valid domain."""
