"""Exception hierarchy. Each class maps to a distinct CLI exit code."""


class CycloError(Exception):
    exit_code = 1


class DomainError(CycloError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 3


class BudgetError(CycloError):
    """The requested exhaustive search exceeds the configured budget."""

    exit_code = 4


class PersistenceError(CycloError):
    exit_code = 5


class ConfigError(CycloError, ValueError):
    exit_code = 6


class IntegrityError(CycloError, ArithmeticError):
    """An exact computation produced an impossible result (e.g. a nonzero remainder)."""

    exit_code = 7


class ResourceError(CycloError, MemoryError):
    exit_code = 8
