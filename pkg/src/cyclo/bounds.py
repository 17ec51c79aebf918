"""Pointwise checks of the height inequalities and the density-lemma constants.

Heights are exact integers, so only their logarithms ever become real
numbers.  Real comparisons run in mpmath at ``WORKING_PRECISION`` bits with a
relative guard band; inside the band a rational exponent is settled by an
exact integer comparison and anything else is reported as borderline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Mapping

import mpmath
import numpy as np

from .cyclotomic import CycloCache, default_cache, height_A, height_A0
from .errors import DomainError
from .numtheory import divisors_from, factorize

WORKING_PRECISION = 96
GUARD_BAND = 1e-12
GRID_RESOLUTION = 1e-3
GRID_POINTS = 201
# Exact power comparisons are attempted only below this many bits.
EXACT_BIT_LIMIT = 10**7

PASS, FAIL, BORDERLINE = "pass", "fail", "borderline"


@dataclass(frozen=True)
class Comparison:
    """Outcome of ``value <= base ** exponent``; margin is in log space (rhs - lhs)."""

    status: str
    margin: float
    exact: bool = False

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _exact_power_le(value: int, base: int, exponent: Fraction) -> bool:
    num, den = exponent.numerator, exponent.denominator
    if num >= 0:
        return value**den <= base**num
    return value**den * base**-num <= 1


def compare_power(value: int, base: int, exponent) -> Comparison:
    """Decide value <= base**exponent for a positive integer value and base >= 2."""
    if value < 1 or base < 2:
        raise DomainError("need value >= 1 and base >= 2")
    rational = isinstance(exponent, Rational)
    with mpmath.workprec(WORKING_PRECISION):
        lhs = mpmath.log(value)
        rhs = mpmath.mpf(exponent.numerator) / exponent.denominator if rational else mpmath.mpf(exponent)
        rhs = rhs * mpmath.log(base)
        margin = rhs - lhs
        scale = max(abs(lhs), abs(rhs), mpmath.mpf(1))
        relative = abs(margin) / scale
    if rational:
        e = Fraction(exponent)
        bits = abs(e.numerator) * base.bit_length() + e.denominator * value.bit_length()
        if bits <= EXACT_BIT_LIMIT:
            ok = _exact_power_le(value, base, e)
            return Comparison(PASS if ok else FAIL, float(margin), exact=True)
    if relative >= GUARD_BAND:
        return Comparison(PASS if margin > 0 else FAIL, float(margin))
    return Comparison(BORDERLINE, float(margin))


def chain_bound(n: int, cache: CycloCache | None = None) -> tuple[int, int]:
    """(n^tau * prod_{d|n} A(d),  n^tau * A0(n)^tau), both exact."""
    if n < 2:
        raise DomainError("the divisor-product chain is stated for n > 1")
    cache = default_cache() if cache is None else cache
    divs = divisors_from(factorize(n))
    t = len(divs)
    prod = 1
    for d in divs:
        prod *= height_A(d, cache)
    a0, _ = height_A0(n, cache)
    return n**t * prod, n**t * a0**t


@dataclass(frozen=True)
class BatemanReport:
    n: int
    A: int
    k: int
    holds: bool
    bpv: Mapping[str, Comparison | None] = field(default_factory=dict)


def bpv_exponents(k: int) -> dict[str, Fraction | None]:
    """Both readings of the exponent 2^(k-1)/k-1."""
    top = Fraction(2 ** (k - 1))
    return {
        "2^(k-1)/k - 1": top / k - 1,
        "2^(k-1)/(k-1)": top / (k - 1) if k > 1 else None,
    }


def bateman_check(n: int, cache: CycloCache | None = None) -> BatemanReport:
    """A(n) <= n^(2^(k-1)) with k = omega(n), plus both BPV exponent readings."""
    if n < 2:
        raise DomainError("n must be >= 2")
    a = height_A(n, cache)
    k = factorize(n).omega
    holds = _exact_power_le(a, n, Fraction(2 ** (k - 1)))
    bpv = {
        name: (None if e is None else compare_power(a, n, e))
        for name, e in bpv_exponents(k).items()
    }
    return BatemanReport(n, a, k, holds, bpv)


def maier_sum(n: int) -> float:
    """sum_{k=1}^{omega(n)} 2^k log p_k(n), natural log, no constant folded in."""
    if n < 2:
        raise DomainError("n must be >= 2")
    primes = factorize(n).primes
    return math.fsum(2 ** (k + 1) * math.log(p) for k, p in enumerate(primes))


@dataclass(frozen=True)
class MaierParams:
    gamma: float
    b: float
    epsilon: float
    c0: float
    C2: float
    C2_empirical: bool
    k0: float

    def constraint_residual(self) -> float:
        """(1+eps)(b-1)/log b * log gamma - 1; feasible when <= 0."""
        return constraint_residual(self.gamma, self.b, self.epsilon)


def constraint_residual(gamma: float, b: float, epsilon: float) -> float:
    return (1 + epsilon) * (b - 1) / math.log(b) * math.log(gamma) - 1


def _check_gamma(gamma: float) -> None:
    if not 2 < gamma < math.e:
        raise DomainError(f"gamma must lie in (2, e), got {gamma}")


def optimize_b_epsilon(gamma: float, resolution: float = GRID_RESOLUTION) -> tuple[float, float]:
    """Grid search for (b, eps) maximizing eps(b-1)log(gamma) under the constraint.

    A coarse grid over the whole feasible box is refined around the best
    feasible point until the grid step drops below ``resolution``.
    """
    _check_gamma(gamma)
    lg = math.log(gamma)
    b_lo, b_hi = 1.0, 3.0
    e_lo, e_hi = 0.0, 1.0 / lg - 1.0
    best = None
    while True:
        bs = np.linspace(b_lo, b_hi, GRID_POINTS)[1:] if b_lo == 1.0 else np.linspace(b_lo, b_hi, GRID_POINTS)
        es = np.linspace(e_lo, e_hi, GRID_POINTS)[1:] if e_lo == 0.0 else np.linspace(e_lo, e_hi, GRID_POINTS)
        B, E = np.meshgrid(bs, es, indexing="ij")
        feasible = (1 + E) * (B - 1) / np.log(B) * lg <= 1
        c0 = np.where(feasible, E * (B - 1) * lg, -np.inf)
        i, j = np.unravel_index(np.argmax(c0), c0.shape)
        if not np.isfinite(c0[i, j]):
            raise DomainError("no feasible (b, epsilon) on the grid")
        best = (float(bs[i]), float(es[j]))
        db, de = bs[1] - bs[0], es[1] - es[0]
        if max(db, de) <= resolution:
            break
        b_lo, b_hi = max(1.0, best[0] - 4 * db), best[0] + 4 * db
        e_lo, e_hi = max(0.0, best[1] - 4 * de), best[1] + 4 * de
    b, eps = best
    # Guard against rounding putting the chosen point a hair outside.
    while constraint_residual(gamma, b, eps) > 0:
        eps = math.nextafter(eps, 0.0)
    return b, eps


def k0_formula(c0: float, C2: float, epsilon: float) -> float:
    """log(eps (1 - e^{-c0}) / C2) / (-c0)."""
    if c0 <= 0 or C2 <= 0 or epsilon <= 0:
        raise DomainError("c0, C2 and epsilon must be positive")
    return math.log(epsilon * -math.expm1(-c0) / C2) / -c0


def k0_of(params: MaierParams, epsilon: float) -> float:
    return k0_formula(params.c0, params.C2, epsilon)


def fit_C2(counts: Mapping[int, int], x: int, c0: float) -> float:
    """Smallest C2 with count_k <= C2 x e^{-c0 k} for every observed k."""
    ratios = [cnt / (x * math.exp(-c0 * k)) for k, cnt in counts.items()]
    if not ratios or max(ratios) <= 0:
        raise DomainError("no positive counts to fit C2 against")
    c2 = max(ratios)
    # Rounding in the bound could leave a ratio a hair above 1.
    while any(cnt > c2 * x * math.exp(-c0 * k) for k, cnt in counts.items()):
        c2 = math.nextafter(c2, math.inf)
    return c2


def maier_constants(
    gamma: float,
    C2: float | None = None,
    empirical_x: int | None = None,
    resolution: float = GRID_RESOLUTION,
) -> MaierParams:
    """Constants for the p_k count bound and its k0 threshold.

    Give either an explicit ``C2`` or ``empirical_x``; in the latter case C2
    is fitted to the exact counts at that x and flagged as empirical.  k0 is
    evaluated with the same epsilon as the constraint.
    """
    _check_gamma(gamma)
    if (C2 is None) == (empirical_x is None):
        raise DomainError("pass exactly one of C2 or empirical_x")
    b, eps = optimize_b_epsilon(gamma, resolution)
    c0 = eps * (b - 1) * math.log(gamma)
    if C2 is None:
        from .experiments import lemma32_counts

        counts = lemma32_counts(empirical_x, gamma)
        C2 = fit_C2(counts, empirical_x, c0)
        empirical = True
    else:
        if C2 <= 0:
            raise DomainError("C2 must be positive")
        empirical = False
    return MaierParams(gamma, b, eps, c0, C2, empirical, k0_formula(c0, C2, eps))


def theorem12_check(n: int, psi_value, b_value: int) -> Comparison:
    """B(n) <= n^(tau(n) psi(n))."""
    if n < 2:
        raise DomainError("n must be >= 2")
    if psi_value <= 0:
        raise DomainError("psi must be positive")
    t = len(divisors_from(factorize(n)))
    exponent = t * psi_value if isinstance(psi_value, Rational) else t * float(psi_value)
    return compare_power(b_value, n, exponent)


def prop21_check(n: int, psi_value, a0: int) -> Comparison:
    """A0(n) <= n^psi(n)."""
    if n < 2:
        raise DomainError("n must be >= 2")
    return compare_power(a0, n, psi_value)
