"""Sparse kernels that multiply or divide by x^e - 1 along the last axis.

Every cyclotomic factor is Phi_d(x) = prod_{e | d} (x^e - 1)^{mu(d/e)}, so
multiplying or dividing a dense array by Phi_d costs 2^omega(d) linear
passes instead of one dense convolution.  All passes are additions and
subtractions only, which keeps them exact in three settings:

* object arrays (Python ints) - always exact;
* int64 arrays - exact modulo 2^64, hence exact whenever the *final* true
  coefficients are known to lie below 2^63 in magnitude;
* float64 arrays - exact as long as every intermediate stays below 2^52,
  which :func:`guarded` checks after each pass.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .numtheory import factorize, divisors_from

FLOAT_EXACT_LIMIT = float(2**52)


class Inexact(Exception):
    """Float64 magnitude guard tripped; recompute with Python ints."""


@lru_cache(maxsize=4096)
def mobius_terms(d: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split {e | d : mu(d/e) != 0} into (mu = +1, mu = -1) exponents."""
    fac = factorize(d)
    plus, minus = [], []
    for e in divisors_from(fac):
        q = d // e
        sign = 1
        for p, _ in fac.factors:
            if q % p == 0:
                if (q // p) % p == 0:
                    sign = 0
                    break
                sign = -sign
        if sign == 1:
            plus.append(e)
        elif sign == -1:
            minus.append(e)
    return tuple(plus), tuple(minus)


def mul_xe_minus_one(a: np.ndarray, e: int) -> np.ndarray:
    """a * (x^e - 1); the top e columns of ``a`` must be zero."""
    out = np.empty_like(a)
    out[..., :e] = 0
    out[..., e:] = a[..., :-e]
    out -= a
    return out


def div_xe_minus_one(a: np.ndarray, e: int) -> np.ndarray:
    """Exact quotient a / (x^e - 1), assuming divisibility.

    From f = x^e q - q: q[i] = -(f[i] + f[i-e] + f[i-2e] + ...).
    """
    width = a.shape[-1]
    if e == 1:
        return -np.cumsum(a, axis=-1)
    blocks = -(-width // e)
    lead = a.shape[:-1]
    buf = np.zeros(lead + (blocks * e,), dtype=a.dtype)
    buf[..., :width] = a
    buf = buf.reshape(lead + (blocks, e))
    np.cumsum(buf, axis=-2, out=buf)
    return -(buf.reshape(lead + (blocks * e,))[..., :width])


def apply_cyclotomic(a: np.ndarray, d: int, divide: bool = False) -> np.ndarray:
    """Multiply (or exactly divide) each row of ``a`` by Phi_d.

    Multiplications run before divisions so each division is exact; the
    array must be wide enough to hold the intermediate degree.
    """
    plus, minus = mobius_terms(d)
    ups, downs = (minus, plus) if divide else (plus, minus)
    for e in ups:
        a = mul_xe_minus_one(a, e)
    for e in downs:
        a = div_xe_minus_one(a, e)
    return a


def intermediate_growth(d: int, divide: bool = False) -> int:
    """Extra width needed while applying Phi_d^(+-1)."""
    plus, minus = mobius_terms(d)
    return sum(minus if divide else plus)


def guarded(a: np.ndarray) -> np.ndarray:
    if a.dtype == np.float64 and a.size and max(a.max(), -a.min()) >= FLOAT_EXACT_LIMIT:
        raise Inexact
    return a


def _half_series(m: int, length: int, dtype) -> np.ndarray:
    a = np.zeros(length, dtype=dtype)
    a[0] = 1
    plus, minus = mobius_terms(m)
    # Phi_m = prod (1 - x^e)^{mu(m/e)} for m > 1; factors with e >= length
    # are 1 modulo x^length.
    for e in plus:
        if e < length:
            a[e:] -= a[:-e].copy()
            guarded(a)
    for e in minus:
        if e < length:
            blocks = -(-length // e)
            buf = np.zeros(blocks * e, dtype=dtype)
            buf[:length] = a
            buf = buf.reshape(blocks, e)
            np.cumsum(buf, axis=0, out=buf)
            a = guarded(buf.reshape(-1)[:length].copy())
    return a


def cyclotomic_lower_half(m: int, phi_m: int) -> np.ndarray:
    """First phi(m)//2 + 1 coefficients of Phi_m for m > 1.

    Phi_m is palindromic for m > 1, so this determines the polynomial.  The
    result is float64 (every entry an exact integer) or, when the magnitude
    guard trips, an object array of Python ints.
    """
    length = phi_m // 2 + 1
    try:
        return _half_series(m, length, np.float64)
    except Inexact:
        return _half_series(m, length, object)


def array_height(a: np.ndarray) -> int:
    if a.dtype == object:
        return int(max(abs(v) for v in a))
    return int(max(a.max(), -a.min()))


def to_ints(a: np.ndarray) -> list[int]:
    if a.dtype == object:
        return [int(v) for v in a]
    return a.astype(np.int64).tolist()
