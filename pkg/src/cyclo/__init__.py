"""Exact heights of cyclotomic polynomials and of the divisors of x^n - 1."""

__version__ = "0.1.0"

from .cyclotomic import CycloCache, cyclotomic, height_A, height_A0
from .errors import (
    BudgetError,
    ConfigError,
    CycloError,
    DomainError,
    IntegrityError,
    PersistenceError,
    ResourceError,
)
from .polynomial import IntPoly, poly_height, poly_mul
from .search import BnResult, height_B, pr_bound

__all__ = [
    "BnResult",
    "BudgetError",
    "ConfigError",
    "CycloCache",
    "CycloError",
    "DomainError",
    "IntPoly",
    "IntegrityError",
    "PersistenceError",
    "ResourceError",
    "cyclotomic",
    "height_A",
    "height_A0",
    "height_B",
    "pr_bound",
    "poly_height",
    "poly_mul",
]
