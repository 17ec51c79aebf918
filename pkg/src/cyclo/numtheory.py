"""Factorization and the classical arithmetic functions.

Prime factors are always listed in *decreasing* order, so ``factors[k-1]``
holds the k-th largest prime ``p_k(n)``.  Single queries use trial division
with a 6k +/- 1 wheel; range scans use :class:`SpfSieve`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import isqrt
from operator import mul

import numpy as np

from .errors import DomainError, ResourceError

# Largest sieve the library will allocate (entries, int32 each).
SIEVE_MEMORY_CAP = 2 * 10**8


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        primes = [p for p, _ in self.factors]
        if any(a <= b for a, b in zip(primes, primes[1:])):
            raise ValueError("primes must be strictly decreasing")
        if any(e < 1 for _, e in self.factors):
            raise ValueError("exponents must be >= 1")
        if reduce(mul, (p**e for p, e in self.factors), 1) != self.n:
            raise ValueError(f"factors do not multiply to {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    def p_k(self, k: int) -> int:
        """k-th largest distinct prime, or 1 once k exceeds omega."""
        if k < 1:
            raise DomainError("k must be >= 1")
        return self.factors[k - 1][0] if k <= len(self.factors) else 1

    def as_list(self) -> list[tuple[int, int]]:
        return list(self.factors)


def _check_positive(n: int) -> None:
    if n < 1:
        raise DomainError(f"expected a positive integer, got {n}")


def _trial_division(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _from_dict(n: int, d: dict[int, int]) -> Factorization:
    return Factorization(n, tuple(sorted(d.items(), reverse=True)))


def factorize(n: int) -> Factorization:
    _check_positive(n)
    return _from_dict(n, _trial_division(n))


def divisors_from(fac: Factorization) -> list[int]:
    divs = [1]
    for p, e in fac.factors:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def divisors(n: int) -> list[int]:
    return divisors_from(factorize(n))


def tau(n: int) -> int:
    return reduce(mul, (e + 1 for _, e in factorize(n).factors), 1)


def omega(n: int) -> int:
    return factorize(n).omega


def phi(n: int) -> int:
    result = n
    for p, _ in factorize(n).factors:
        result -= result // p
    return result


def mu(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac.factors):
        return 0
    return -1 if fac.omega % 2 else 1


def rad(n: int) -> int:
    return reduce(mul, factorize(n).primes, 1)


def p_k(n: int, k: int) -> int:
    return factorize(n).p_k(k)


def _check_cap(limit: int) -> None:
    if limit > SIEVE_MEMORY_CAP:
        raise ResourceError(f"sieve limit {limit} exceeds memory cap {SIEVE_MEMORY_CAP}")


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    _check_cap(limit)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


class SpfSieve:
    """Smallest-prime-factor table for 0..limit.

    Built once and read-only afterwards, so one instance can be shared by
    any number of readers.
    """

    def __init__(self, limit: int):
        if limit < 2:
            raise DomainError("sieve limit must be >= 2")
        _check_cap(limit)
        self.limit = limit
        spf = np.zeros(limit + 1, dtype=np.int32)
        for p in range(2, isqrt(limit) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        rest = np.flatnonzero(spf == 0)
        spf[rest] = rest
        spf[0] = 0
        spf[1] = 1
        self.table = spf

    def __getitem__(self, n: int) -> int:
        return int(self.table[n])

    def factor_dict(self, n: int) -> dict[int, int]:
        _check_positive(n)
        if n > self.limit:
            raise DomainError(f"{n} exceeds sieve limit {self.limit}")
        d: dict[int, int] = {}
        table = self.table
        while n > 1:
            p = int(table[n])
            d[p] = d.get(p, 0) + 1
            n //= p
        return d

    def factorize(self, n: int) -> Factorization:
        return _from_dict(n, self.factor_dict(n))

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return np.flatnonzero((self.table == idx) & (idx >= 2)).astype(np.int64)


def spf_sieve(limit: int) -> SpfSieve:
    return SpfSieve(limit)


def omega_table(limit: int) -> np.ndarray:
    """omega(n) for 0 <= n <= limit (entries 0 and 1 are 0)."""
    _check_cap(limit)
    out = np.zeros(limit + 1, dtype=np.int8)
    for p in primes_up_to(limit):
        out[p::p] += 1
    return out


def prime_rank_tables(limit: int, depth: int) -> np.ndarray:
    """Array P of shape (depth, limit+1) with P[k-1, n] = p_k(n).

    Primes are swept in ascending order; each new prime dividing n pushes the
    previously recorded ones one rank down, so after the sweep row 0 holds
    the largest prime, row 1 the second largest, and so on (1 when absent).
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if limit * depth > SIEVE_MEMORY_CAP:
        raise ResourceError("prime rank tables exceed memory cap")
    ranks = np.ones((depth, limit + 1), dtype=np.int32)
    for p in primes_up_to(limit):
        sl = slice(p, limit + 1, p)
        for j in range(depth - 1, 0, -1):
            ranks[j, sl] = ranks[j - 1, sl]
        ranks[0, sl] = p
    return ranks
