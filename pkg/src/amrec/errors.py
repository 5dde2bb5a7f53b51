"""Exception types shared across the package.

The CLI maps these onto exit codes: input/validation problems exit 1,
numerical failures exit 2.
"""


class AmrecError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AmrecError):
    """A corpus file line could not be parsed."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class ValidationError(AmrecError):
    """Input data violates a documented invariant."""


class ColdStartError(AmrecError):
    """A concept without a trained latent vector was asked to be scored."""


class NumericalError(AmrecError):
    """The solver produced a singular system or a non-finite objective."""
