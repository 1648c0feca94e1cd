"""Exception types raised by braidcryst.

Every domain error is a ``ValueError`` so callers that only care about bad
input can catch that; the CLI reads ``exit_code`` to pick a distinct status.
"""


class BraidCrystError(ValueError):
    exit_code = 2


class MalformedWordError(BraidCrystError):
    exit_code = 3


class StrandMismatchError(BraidCrystError):
    exit_code = 3


class UnsupportedModeError(BraidCrystError):
    exit_code = 4


class GuardExceededError(BraidCrystError):
    exit_code = 5


class NotASubgroupError(BraidCrystError):
    exit_code = 6


class NotInSubgroupError(BraidCrystError):
    exit_code = 6


class InvalidBasisError(BraidCrystError):
    exit_code = 7

    def __init__(self, message: str, determinant: int):
        super().__init__(message)
        self.determinant = determinant


class FormDiscoveryError(BraidCrystError):
    exit_code = 8
