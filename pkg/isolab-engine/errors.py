"""
Exception hierarchy for the isogeny lab.

Every error carries the CLI exit code of its failure class:
usage errors exit with 2, failed assertions with 3, exhausted budgets with 4.
"""

from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    USAGE = 2
    ASSERTION = 3
    BUDGET = 4


class IsolabError(Exception):
    """Base class for every error raised by the engine."""
    exit_code = ExitCode.ASSERTION


# ------------------------------------------------------
# Usage errors (bad inputs)
# ------------------------------------------------------
class UsageError(IsolabError):
    exit_code = ExitCode.USAGE


class PointNotOnCurve(UsageError):
    pass


class DiscriminantMismatch(UsageError):
    pass


class SupersingularCurve(UsageError):
    pass


class UnsupportedLevel(UsageError):
    pass


class VertexOutOfRange(UsageError):
    pass


class NotInSubgroup(UsageError):
    pass


class KernelMeetsSubgroup(UsageError):
    pass


class AtSurface(UsageError):
    pass


class AtFloor(UsageError):
    pass


class SeedNotFound(UsageError):
    pass


class NotSymmetric(UsageError):
    pass


class NotRegular(UsageError):
    pass


class SpectralGapZero(UsageError):
    pass


# ------------------------------------------------------
# Assertion errors (a computed invariant failed)
# ------------------------------------------------------
class AmbiguousOrder(IsolabError):
    pass


class InvalidKernel(IsolabError):
    pass


class AssertionFailed(IsolabError, RuntimeError):
    """A computed invariant did not hold."""


# ------------------------------------------------------
# Budget errors (configured effort exhausted)
# ------------------------------------------------------
class BudgetError(IsolabError):
    exit_code = ExitCode.BUDGET


class FactorizationTimeout(BudgetError):
    pass


class ClassNumberTooLarge(BudgetError):
    pass


class DimensionTooLarge(BudgetError):
    pass


class SubsetSearchTooLarge(BudgetError):
    pass


class QueryBudgetExhausted(BudgetError):
    pass
