import pickle

import pytest
import sympy

from cyclo.cyclotomic import (
    CycloCache,
    cyclotomic,
    cyclotomic_by_division,
    height_A,
    height_A0,
)
from cyclo.numtheory import divisors, phi, rad
from cyclo.polynomial import IntPoly, poly_height

x = sympy.Symbol("x")


def sympy_phi(n):
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()))


def test_small_examples(cache):
    assert cyclotomic(1, cache).coeffs == (-1, 1)
    assert cyclotomic(6, cache).coeffs == (1, -1, 1)
    f = cyclotomic(105, cache)
    assert f.degree == 48 and poly_height(f) == 2


@pytest.mark.parametrize("n", [1, 2, 12, 30, 105, 210, 385, 1155, 1365, 2310, 4096, 6545])
def test_matches_sympy(n, cache):
    assert cyclotomic(n, cache).coeffs == sympy_phi(n)


def test_matches_division_route(cache):
    memo = {}
    for n in range(1, 200):
        assert cyclotomic(n, cache) == cyclotomic_by_division(n, memo)


def test_heights(cache):
    assert height_A(2, cache) == 1
    assert height_A(105, cache) == 2
    assert height_A(210, cache) == 2
    assert height_A(255255, cache) == 532


def test_height_A0(cache):
    assert height_A0(1, cache) == (1, 1)
    assert height_A0(105, cache) == (2, 105)
    assert height_A0(210, cache) == (2, 105)


def test_large_height_object_fallback(cache):
    # Published height of Phi_4849845; degree is far past the polynomial cache bound.
    n = 3 * 5 * 7 * 11 * 13 * 17 * 19
    assert height_A(n, cache) == 669606
    assert n not in cache.polys and cache.heights[n] == 669606


def test_cache_invariants(cache):
    for n in range(1, 400):
        cyclotomic(n, cache)
    for m, f in cache.polys.items():
        assert m == rad(m)
        assert f.degree == phi(m)
        assert cache.heights[m] == poly_height(f)


def test_cache_pickles(cache):
    cyclotomic(30, cache)
    clone = pickle.loads(pickle.dumps(cache))
    assert clone.polys == cache.polys
    clone.store(7, IntPoly([1] * 7), 1)


def test_rejects_nonpositive():
    with pytest.raises(ValueError):
        cyclotomic(0)
    with pytest.raises(ValueError):
        height_A0(-1)


def test_a0_is_max_over_divisors(cache):
    for n in (60, 210, 420, 1155, 2310):
        assert height_A0(n, cache)[0] == max(height_A(d, cache) for d in divisors(n))
