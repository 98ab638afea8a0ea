"""Exception hierarchy shared by every module."""


class PotselError(Exception):
    """Base class for all package errors."""


class DomainError(PotselError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class InsufficientData(PotselError, ValueError):
    pass


class NonConvergence(PotselError, RuntimeError):
    """The likelihood search found no interior maximum."""


class UnsupportedShape(PotselError, ValueError):
    """Shape estimate falls outside the embedded critical-value table."""


class DegenerateGrid(PotselError, ValueError):
    pass


class RegularityViolation(PotselError, ValueError):
    """Shape <= -0.5, where the MLE is not asymptotically normal."""


class NonPositiveVariance(PotselError, ArithmeticError):
    pass


class InvalidSpec(PotselError, ValueError):
    pass


class FileUnreadable(PotselError, OSError):
    pass


class SchemaMismatch(PotselError, ValueError):
    pass


class EmptyAfterParse(PotselError, ValueError):
    pass


class YearAbsent(PotselError, KeyError):
    pass
