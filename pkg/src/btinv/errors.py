"""Exception types shared across the package.

Exit-code mapping used by the CLI lives in btinv.cli: NotPositiveDefiniteError
-> 2, I/O and format errors -> 3, InternalConsistencyError -> 4.
"""


class NotPositiveDefiniteError(Exception):
    """The input matrix is not Hermitian positive definite.

    ``where`` identifies the failure site: a pivot/diagonal index ``k`` or a
    recursion step ``(k, l)``.
    """

    def __init__(self, message, where=None):
        if where is not None:
            message = f"{message} [at {where}]"
        super().__init__(message)
        self.where = where


class InternalConsistencyError(Exception):
    """An internal identity that must hold on valid input was violated.

    Raised e.g. when the conjugate-numerator identity fails beyond tolerance
    or when the block-Toeplitz schedule requests a predecessor that was never
    computed. Indicates a bug or a corrupted state, never a property of the
    input.
    """


class MatrixFormatError(Exception):
    """Malformed matrix/vector file. Carries the 1-based source line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
