"""
Exception types raised by the laboratory.

Every error derives from :class:`LabError` and from the builtin exception that
best describes it, so callers may catch either.
"""


class LabError(Exception):
    pass


class DimensionMismatch(LabError, ValueError):
    pass


class InvalidMatrix(LabError, ValueError):
    """The input is not a finite, non-empty two-dimensional matrix."""
    pass


class NotPSD(LabError, ValueError):
    pass


class NotHermitian(NotPSD):
    pass


class NotInBA(LabError, ValueError):
    """The operator fails the Douglas range condition, so it has no A-adjoint."""
    pass


class DegenerateContext(LabError, ValueError):
    """The A-unit sphere is empty (A = 0)."""
    pass


class ConvergenceFailure(LabError, ArithmeticError):
    pass


class InconsistentTags(LabError, ValueError):
    pass


class ConstructionFailed(LabError, RuntimeError):
    pass


class ConfigError(LabError, ValueError):
    """A user supplied configuration, flag or input file is unusable."""
    pass


# Errors that report a property of the mathematical input rather than a
# malformed request.
DOMAIN_ERRORS = (NotInBA, NotPSD, DegenerateContext, DimensionMismatch,
                 ConvergenceFailure)
