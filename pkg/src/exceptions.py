from typing import Optional


class QtlabError(Exception):
    """Base class for every error raised by the library."""


class MatrixFormatError(QtlabError, ValueError):
    """Malformed matrix, pattern or index input."""


class InvalidDiagonal(QtlabError, ValueError):
    """A diagonal component is not +1 or -1, so no characteristic function produces the matrix."""


class NotNormalized(QtlabError, ValueError):
    """An Integer matrix whose diagonal blocks are not all 1."""


class MatrixNotValid(QtlabError, ValueError):
    """An operation that needs a valid matrix received an invalid one."""

    def __init__(self, message: str, certificate: Optional[object] = None):
        super().__init__(message)
        self.certificate = certificate


class NotUnipotent(QtlabError, ValueError):
    """A Bott tower was requested for a matrix that is not conjugate to unipotent form."""


class MixedRingError(QtlabError, ValueError):
    """Ring elements that belong to different rings were combined."""


class PermutationSearchExceeded(QtlabError, RuntimeError):
    """The permutation search was asked to run above its size guard."""


class InvariantViolation(QtlabError, RuntimeError):
    """A mathematical invariant failed; this is always a bug or corrupt input that slipped through."""


class RankMismatch(InvariantViolation):
    """A graded piece of the cohomology ring does not have the Poincare rank."""
