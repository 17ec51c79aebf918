"""Cyclotomic polynomials Phi_n, their heights A(n), and A0(n) = max_{d|n} A(d).

Everything is keyed by the squarefree radical: Phi_n(x) = Phi_rad(n)(x^(n/rad n)),
so A(n) = A(rad n) and only squarefree keys are ever stored.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

from . import _kernels
from .numtheory import Factorization, divisors_from, factorize
from .polynomial import IntPoly, poly_exact_div, poly_height, poly_inflate, x_pow_minus_one

# Polynomials of degree above this are not kept in the cache (heights always are).
POLY_CACHE_MAX_DEGREE = 2048


def _squarefree_part(fac: Factorization) -> int:
    r = 1
    for p in fac.primes:
        r *= p
    return r


@dataclass
class CycloCache:
    """Memo tables for Phi_m and A(m), m squarefree.

    Reads need no lock.  Writers take ``_lock`` only around the dict
    insertion; two threads may compute the same Phi_m concurrently, and the
    results are identical, so the later write is harmless.
    """

    polys: dict[int, IntPoly] = field(default_factory=dict)
    heights: dict[int, int] = field(default_factory=dict)
    max_poly_degree: int = POLY_CACHE_MAX_DEGREE
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def store(self, m: int, poly: IntPoly | None, height: int) -> None:
        with self._lock:
            if poly is not None and poly.degree <= self.max_poly_degree:
                self.polys[m] = poly
            self.heights[m] = height

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()


_default_cache = CycloCache()


def default_cache() -> CycloCache:
    return _default_cache


def _totient(fac: Factorization) -> int:
    r = fac.n
    for p in fac.primes:
        r -= r // p
    return r


def _squarefree_poly(m: int, cache: CycloCache) -> IntPoly:
    poly = cache.polys.get(m)
    if poly is not None:
        return poly
    if m == 1:
        poly = IntPoly([-1, 1])
    else:
        phi_m = _totient(factorize(m))
        half = _kernels.to_ints(_kernels.cyclotomic_lower_half(m, phi_m))
        full = half + half[: phi_m + 1 - len(half)][::-1]
        poly = IntPoly(full)
    cache.store(m, poly, poly_height(poly))
    return poly


def cyclotomic(n: int, cache: CycloCache | None = None) -> IntPoly:
    """Phi_n via its radical: Phi_rad(n) is computed once, then inflated."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cache = _default_cache if cache is None else cache
    fac = factorize(n)
    r = _squarefree_part(fac)
    return poly_inflate(_squarefree_poly(r, cache), n // r)


def _squarefree_height(m: int, cache: CycloCache) -> int:
    h = cache.heights.get(m)
    if h is not None:
        return h
    if m == 1:
        h = 1
        cache.store(1, IntPoly([-1, 1]), 1)
        return h
    phi_m = _totient(factorize(m))
    if phi_m <= cache.max_poly_degree:
        return poly_height(_squarefree_poly(m, cache))
    h = _kernels.array_height(_kernels.cyclotomic_lower_half(m, phi_m))
    cache.store(m, None, h)
    return h


def height_A(n: int, cache: CycloCache | None = None) -> int:
    """A(n) = H(Phi_n), evaluated as A(rad n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cache = _default_cache if cache is None else cache
    return _squarefree_height(_squarefree_part(factorize(n)), cache)


def height_A0(n: int, cache: CycloCache | None = None) -> tuple[int, int]:
    """(A0(n), witness d): the largest A(d) over d | n.

    Since A(d) = A(rad d), only squarefree divisors need evaluating; the
    witness is the smallest divisor of n attaining the maximum, which is
    always squarefree.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cache = _default_cache if cache is None else cache
    fac = factorize(n)
    best, witness = 0, 1
    for d in divisors_from(Factorization(_squarefree_part(fac), tuple((p, 1) for p in fac.primes))):
        h = _squarefree_height(d, cache)
        if h > best:
            best, witness = h, d
    return best, witness


def cyclotomic_by_division(n: int, cache: dict[int, IntPoly] | None = None) -> IntPoly:
    """Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d by repeated exact division.

    Slow reference route kept independent of the sparse kernels.
    """
    memo = {} if cache is None else cache
    if n in memo:
        return memo[n]
    f = x_pow_minus_one(n)
    for d in divisors_from(factorize(n))[:-1]:
        f = poly_exact_div(f, cyclotomic_by_division(d, memo))
    memo[n] = f
    return f
