"""Exception hierarchy shared by the library and the CLI."""


class BooltypeError(Exception):
    """Base class for domain errors (CLI exit status 1)."""

    prefix = "error"


class AlgebraMismatch(BooltypeError):
    prefix = "algebra-mismatch"


class InvalidHomomorphism(BooltypeError):
    prefix = "invalid-homomorphism"


class OutOfInterval(BooltypeError):
    prefix = "out-of-interval"


class GuardExceeded(BooltypeError):
    prefix = "guard-exceeded"


class FormulaSyntaxError(BooltypeError):
    prefix = "syntax-error"

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)
        self.position = position


class SignatureError(BooltypeError):
    prefix = "signature-error"


class StructureFormatError(BooltypeError):
    prefix = "structure-format"


class NotDefinable(BooltypeError):
    prefix = "not-definable"


class InsufficientShattering(BooltypeError):
    prefix = "insufficient-shattering"


class InvalidMeasure(BooltypeError):
    prefix = "invalid-measure"
