"""Exception hierarchy.

The three families map onto the CLI exit codes: domain errors (2),
numeric failures (3) and resource limits (4).
"""


class MultibaseError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MultibaseError, ValueError):
    """An input violates a mathematical precondition."""


class NonCoprimeBases(DomainError):
    def __init__(self, i: int, j: int, bases=None):
        self.i, self.j = i, j
        msg = f"NonCoprimeBases({i},{j})"
        if bases is not None:
            msg += f": gcd({bases[i - 1]}, {bases[j - 1]}) > 1"
        super().__init__(msg)


class BaseTooSmall(DomainError):
    pass


class TooFewBases(DomainError):
    pass


class DigitBoundTooSmall(DomainError):
    pass


class UnsortedBases(DomainError):
    pass


class WrongArity(DomainError):
    pass


class InvalidRepresentation(DomainError):
    pass


class NumericError(MultibaseError, ArithmeticError):
    """A numerical procedure could not reach its target."""


class ToleranceUnreachable(NumericError):
    pass


class BracketFailure(NumericError):
    pass


class ResourceLimit(MultibaseError):
    """A computation would exceed a configured size limit."""


class OutOfMemory(ResourceLimit, MemoryError):
    pass


class OracleLimitExceeded(ResourceLimit):
    pass


class LimitOverflow(ResourceLimit, OverflowError):
    pass
