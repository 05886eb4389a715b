"""Exception types raised across the package.

All of them derive from ``ValueError`` so callers that only care about
"bad input" can catch that; the CLI maps every one of them to exit status 1.
"""


class SumDilatesError(ValueError):
    pass


class NotPrimeError(SumDilatesError):
    pass


class ModulusMismatchError(SumDilatesError):
    pass


class EmptySetError(SumDilatesError):
    pass


class WindowError(SumDilatesError):
    pass


class SetFileError(SumDilatesError):
    pass


class NotRectifiableError(SumDilatesError):
    pass


class InvalidDilateError(SumDilatesError):
    """A dilation factor that the operation cannot use (zero, degenerate mod p, |λ| < 2)."""


class NoValidSetError(SumDilatesError):
    pass


class ScaleError(SumDilatesError):
    """A computation would exceed its configured size budget."""


class DomainError(SumDilatesError):
    pass


class MultipleRootsError(SumDilatesError):
    pass
