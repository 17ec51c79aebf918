"""Exact B(n): the largest height of any divisor of x^n - 1.

Every divisor of x^n - 1 in Z[x] is +-prod_{d in D} Phi_d for a subset D of
the divisors of n, and the sign does not change the height, so B(n) is a
maximum over 2^tau(n) subsets.  Subsets are encoded as bitmasks, bit j
standing for the j-th smallest divisor.

The enumerator walks the high bits in binary-reflected Gray order, so the
running product changes by one cyclotomic factor per step, and expands the
low bits as a batch: starting from the running product, each low factor
doubles the batch (rows without it, rows with it).  Both steps use the
sparse x^e - 1 kernels.  Batches run in int64 when an l1 bound proves the
true heights fit, and in Python ints otherwise.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .cyclotomic import CycloCache, cyclotomic, default_cache
from .errors import BudgetError, DomainError
from .numtheory import divisors_from, factorize
from .polynomial import IntPoly, poly_height, poly_mul

DEFAULT_MAX_TAU = 20
# Low bits expanded as one batch per Gray step.
BATCH_BITS = 10
INT64_SAFE = 2**63 - 1


@dataclass(frozen=True)
class BnResult:
    n: int
    b_value: int
    witness: tuple[int, ...]
    subsets_examined: int
    pruned: int = 0

    @property
    def witness_product(self) -> IntPoly:
        out = IntPoly([1])
        for d in self.witness:
            out = poly_mul(out, cyclotomic(d))
        return out


def pr_bound(factors: Sequence[IntPoly]) -> int:
    """prod_{i<k} (1 + deg f_i) * prod_i H(f_i) for degree-sorted f_1..f_k.

    An upper bound for H(f_1 ... f_k).
    """
    if not factors:
        raise DomainError("pr_bound needs at least one factor")
    degs = [f.degree for f in factors]
    if any(a > b for a, b in zip(degs, degs[1:])):
        raise DomainError("factors must be sorted by ascending degree")
    out = 1
    for d in degs[:-1]:
        out *= 1 + d
    for f in factors:
        out *= poly_height(f)
    return out


def _better(value: int, mask: int, best: tuple[int, int] | None) -> bool:
    if best is None:
        return True
    if value != best[0]:
        return value > best[0]
    return mask < best[1]


def _reduce(results) -> tuple[int, int]:
    best = None
    for value, mask in results:
        if _better(value, mask, best):
            best = (value, mask)
    return best


def _mask_to_divisors(mask: int, divs: Sequence[int]) -> tuple[int, ...]:
    return tuple(d for j, d in enumerate(divs) if mask >> j & 1)


def _check_budget(tau: int, max_tau: int) -> None:
    if tau > max_tau:
        raise BudgetError(
            f"tau(n) = {tau} exceeds max_tau = {max_tau}; exhaustive search "
            f"needs 2^{tau} = {2**tau} subset evaluations"
        )


class _Plan:
    """Per-n layout shared by every block of the enumeration."""

    def __init__(self, n: int, divs: Sequence[int], batch_bits: int):
        self.n = n
        self.divs = list(divs)
        self.low = min(len(divs), batch_bits)
        growth = max(
            max(_kernels.intermediate_growth(d), _kernels.intermediate_growth(d, True))
            for d in divs
        )
        self.width = n + 1 + growth
        low_divs = self.divs[: self.low]
        # Each low factor is applied either term by term from its dense
        # coefficients or through the x^e - 1 kernels, whichever is cheaper.
        self.recipes = {}
        batch_growth = 0
        for d in low_divs:
            terms = [(k, c) for k, c in enumerate(cyclotomic(d).coeffs) if c]
            plus, minus = _kernels.mobius_terms(d)
            unit = all(abs(c) == 1 for _, c in terms)
            if unit and len(terms) <= len(plus) + 2 * len(minus):
                self.recipes[d] = terms
            else:
                self.recipes[d] = None
                batch_growth = max(batch_growth, _kernels.intermediate_growth(d))
        self.batch_width = n + 1 + batch_growth
        # Costly factors first, while the batch is still small.
        self.order = sorted(range(self.low), key=lambda j: -self._cost(low_divs[j]))
        lowmask = np.zeros(1, dtype=np.int64)
        for j in self.order:
            lowmask = np.concatenate([lowmask, lowmask | (1 << j)])
        self.lowmask = lowmask
        self._buffers = {}
        # The l1 norm is submultiplicative, so this bounds every low batch row
        # and tells whether the int64 expansion below is exact.
        l1 = 1
        for d in low_divs:
            l1 *= sum(abs(c) for c in cyclotomic(d).coeffs)
        self.low_l1 = l1
        self._low_height_max = None

    def _cost(self, d: int) -> int:
        terms = self.recipes[d]
        if terms is not None:
            return len(terms)
        plus, minus = _kernels.mobius_terms(d)
        return len(plus) + 2 * len(minus)

    def _buffer(self, dtype) -> np.ndarray:
        key = np.dtype(dtype)
        buf = self._buffers.get(key)
        if buf is None:
            buf = np.zeros((1 << self.low, self.batch_width), dtype=dtype)
            if key != np.dtype(object):
                self._buffers[key] = buf
        return buf

    def _expand(self, prod: np.ndarray) -> np.ndarray:
        """Rows prod * Q_L for every low subset L, row r <-> lowmask[r]."""
        rows = self._buffer(prod.dtype)
        w = self.batch_width
        rows[0, : min(w, len(prod))] = prod[:w]
        rows[0, len(prod) :] = 0
        h = 1
        for j in self.order:
            d = self.divs[j]
            src, dst = rows[:h], rows[h : 2 * h]
            terms = self.recipes[d]
            if terms is None:
                dst[:] = _kernels.apply_cyclotomic(src, d)
            else:
                k0, c0 = terms[0]
                dst[:, :k0] = 0
                if c0 > 0:
                    dst[:, k0:] = src[:, : w - k0]
                else:
                    np.negative(src[:, : w - k0], out=dst[:, k0:])
                for k, c in terms[1:]:
                    if c > 0:
                        dst[:, k:] += src[:, : w - k]
                    else:
                        dst[:, k:] -= src[:, : w - k]
            h *= 2
        return rows

    def high_product(self, high_mask: int) -> np.ndarray:
        a = np.zeros(self.width, dtype=object)
        a[0] = 1
        for j in range(len(self.divs) - self.low):
            if high_mask >> j & 1:
                a = _kernels.apply_cyclotomic(a, self.divs[self.low + j])
        return a

    @property
    def low_height_max(self) -> int:
        """Largest height among the low batch products themselves."""
        if self._low_height_max is None:
            ones = np.zeros(self.width, dtype=np.int64 if self.low_l1 <= INT64_SAFE else object)
            ones[0] = 1
            rows = self._expand(ones)
            self._low_height_max = int(max(rows.max(), -rows.min()))
        return self._low_height_max

    def batch_best(self, prod: np.ndarray, high_mask: int) -> tuple[int, int]:
        l1 = int(np.abs(prod).sum())
        # Row coefficients are bounded by l1(prod) times the low heights.
        if l1 * self.low_l1 <= INT64_SAFE or l1 * self.low_height_max <= INT64_SAFE:
            rows = self._expand(prod.astype(np.int64))
            heights = np.maximum(rows.max(axis=1), -rows.min(axis=1))
        else:
            rows = self._expand(prod)
            heights = np.array([max(abs(v) for v in row) for row in rows], dtype=object)
        top = heights.max()
        masks = (high_mask << self.low) | self.lowmask[heights == top]
        masks = masks[masks != 0]
        return int(top), int(masks.min())


def _walk_block(plan: _Plan, start: int, stop: int) -> tuple[int, int]:
    """Best (height, mask) over Gray indices start..stop-1 of the high bits."""
    gray = start ^ (start >> 1)
    prod = plan.high_product(gray)
    best = None
    for i in range(start, stop):
        if i > start:
            bit = (i & -i).bit_length() - 1
            d = plan.divs[plan.low + bit]
            removing = bool(gray >> bit & 1)
            gray ^= 1 << bit
            prod = _kernels.apply_cyclotomic(prod, d, divide=removing)
        value, mask = plan.batch_best(prod, gray)
        if _better(value, mask, best):
            best = (value, mask)
    return best


def _worker(args):
    n, divs, batch_bits, start, stop = args
    return _walk_block(_Plan(n, divs, batch_bits), start, stop)


def _enumerate(n: int, divs: Sequence[int], workers: int, batch_bits: int) -> tuple[int, int]:
    plan = _Plan(n, divs, batch_bits)
    total = 1 << (len(divs) - plan.low)
    if workers <= 1 or total < 2 * workers:
        return _walk_block(plan, 0, total)
    nblocks = min(total, 4 * workers)
    edges = [total * k // nblocks for k in range(nblocks + 1)]
    jobs = [(n, list(divs), batch_bits, a, b) for a, b in zip(edges, edges[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return _reduce(pool.map(_worker, jobs))


def _branch_and_bound(n: int, divs: Sequence[int], cache: CycloCache) -> tuple[int, int, int, int]:
    """Depth-first include/exclude search pruned by pr_bound.

    A subtree is cut only when the bound over the current product and the
    whole remaining pool is strictly below the best height found, so ties
    survive and the mask tie-break is unaffected.
    """
    polys = [cyclotomic(d, cache) for d in divs]
    tau = len(divs)
    best = None
    examined = pruned = 0

    def bound(prod: IntPoly, j: int) -> int:
        pool = sorted([prod] + polys[j:], key=lambda f: f.degree)
        return pr_bound(pool)

    stack = [(0, IntPoly([1]), 0)]
    while stack:
        j, prod, mask = stack.pop()
        if j == tau:
            examined += 1
            h = poly_height(prod)
            if mask and _better(h, mask, best):
                best = (h, mask)
            continue
        if best is not None and bound(prod, j) < best[0]:
            pruned += 1 << (tau - j)
            continue
        stack.append((j + 1, poly_mul(prod, polys[j]), mask | (1 << j)))
        stack.append((j + 1, prod, mask))
    if best is None:
        best = (1, 0)
    return best[0], best[1], examined, pruned


def height_B(
    n: int,
    max_tau: int = DEFAULT_MAX_TAU,
    prune: bool = False,
    cache: CycloCache | None = None,
    workers: int = 1,
    batch_bits: int = BATCH_BITS,
) -> BnResult:
    """Exact B(n) with a witness subset.

    The witness is the nonempty subset with the numerically smallest mask
    among all maximizers (bit j = j-th smallest divisor).  ``workers`` > 1
    splits the Gray walk into contiguous blocks run in separate processes;
    0 means one per CPU.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    cache = default_cache() if cache is None else cache
    divs = divisors_from(factorize(n))
    tau = len(divs)
    _check_budget(tau, max_tau)
    if workers == 0:
        workers = os.cpu_count() or 1
    if prune:
        value, mask, examined, pruned = _branch_and_bound(n, divs, cache)
    else:
        value, mask = _enumerate(n, divs, workers, batch_bits)
        examined, pruned = 1 << tau, 0
    return BnResult(n, value, _mask_to_divisors(mask, divs), examined, pruned)


def height_B_naive(n: int, max_tau: int = 16, cache: CycloCache | None = None) -> BnResult:
    """Reference B(n): every subset product rebuilt from scratch with poly_mul."""
    if n < 1:
        raise DomainError("n must be >= 1")
    divs = divisors_from(factorize(n))
    _check_budget(len(divs), max_tau)
    polys = [cyclotomic(d, cache) for d in divs]
    best = None
    for mask in range(1, 1 << len(divs)):
        prod = IntPoly([1])
        for j, f in enumerate(polys):
            if mask >> j & 1:
                prod = poly_mul(prod, f)
        h = poly_height(prod)
        if _better(h, mask, best):
            best = (h, mask)
    return BnResult(n, best[0], _mask_to_divisors(best[1], divs), 1 << len(divs))
