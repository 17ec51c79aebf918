import math
from fractions import Fraction

import pytest

from cyclo.bounds import (
    BORDERLINE,
    FAIL,
    PASS,
    bateman_check,
    bpv_exponents,
    chain_bound,
    compare_power,
    constraint_residual,
    fit_C2,
    k0_formula,
    maier_constants,
    maier_sum,
    optimize_b_epsilon,
    prop21_check,
    theorem12_check,
)
from cyclo.errors import DomainError
from cyclo.search import height_B


def test_compare_power_exact_and_float():
    assert compare_power(8, 2, 3).status == PASS
    assert compare_power(9, 2, 3).status == FAIL
    assert compare_power(8, 2, Fraction(3)).exact
    assert compare_power(3, 9, Fraction(1, 2)).status == PASS
    assert compare_power(4, 9, Fraction(1, 2)).status == FAIL
    assert compare_power(2, 3, 0.7).status == PASS


def test_compare_power_guard_band():
    # log 8 / log 2 evaluated in binary floating point is a hair off 3
    r = compare_power(8, 2, math.log(8) / math.log(2))
    assert r.status in (PASS, BORDERLINE)
    assert compare_power(8, 2, 3.0).status == BORDERLINE


def test_compare_power_domain():
    with pytest.raises(DomainError):
        compare_power(0, 2, 1)


def test_chain_bound_examples():
    assert chain_bound(6) == (1296, 1296)
    assert chain_bound(2)[0] == 4
    first, second = chain_bound(105)
    assert first == 105**8 * 2 and second == first * 2**7
    assert height_B(105).b_value <= first


def test_chain_bound_domain():
    with pytest.raises(DomainError):
        chain_bound(1)


def test_bateman():
    r = bateman_check(105)
    assert (r.A, r.k, r.holds) == (2, 3, True)
    assert bateman_check(13).holds and bateman_check(15).holds
    assert bpv_exponents(1)["2^(k-1)/(k-1)"] is None
    assert bpv_exponents(3) == {"2^(k-1)/k - 1": Fraction(1, 3), "2^(k-1)/(k-1)": Fraction(2)}


def test_maier_sum():
    assert maier_sum(30) == pytest.approx(2 * math.log(5) + 4 * math.log(3) + 8 * math.log(2), abs=1e-9)
    assert maier_sum(30) == pytest.approx(13.158502424, abs=1e-9)
    assert maier_sum(13) == pytest.approx(2 * math.log(13))
    assert maier_sum(60) == maier_sum(30)
    with pytest.raises(DomainError):
        maier_sum(1)


@pytest.mark.parametrize("gamma", [2.1, 2.3, 2.5, 2.7])
def test_optimizer_feasible(gamma):
    b, eps = optimize_b_epsilon(gamma)
    assert constraint_residual(gamma, b, eps) <= 0
    assert b > 1 and eps > 0


def test_optimizer_near_analytic():
    # Near gamma = e the optimum flattens toward zero and the 1e-3 grid cannot
    # resolve it to relative precision, so only the interior is checked.
    for gamma in (2.1, 2.5):
        b, eps = optimize_b_epsilon(gamma)
        lg = math.log(gamma)
        # Along the active constraint c0 = log b - (b - 1) log gamma, maximal at b = 1/log gamma.
        best = -math.log(lg) - (1 / lg - 1) * lg
        assert eps * (b - 1) * lg == pytest.approx(best, rel=1e-3)


def test_maier_constants_identity():
    p = maier_constants(2.5, C2=1.0)
    assert p.c0 > 0
    assert abs(p.c0 - p.epsilon * (p.b - 1) * math.log(2.5)) < 1e-12
    assert p.constraint_residual() <= 0
    assert not p.C2_empirical


def test_maier_constants_domain():
    with pytest.raises(DomainError):
        maier_constants(3.0, C2=1.0)
    with pytest.raises(DomainError):
        maier_constants(2.5)
    with pytest.raises(DomainError):
        maier_constants(2.5, C2=-1.0)


def test_k0_formula():
    assert k0_formula(0.05, 10, 0.01) == pytest.approx(198.56766776, abs=1e-6)
    c0 = 0.1
    eps = 1 / -math.expm1(-c0)
    assert k0_formula(c0, 1.0, eps) == pytest.approx(0.0, abs=1e-12)
    assert k0_formula(c0, 2.0, 0.01) - k0_formula(c0, 1.0, 0.01) == pytest.approx(math.log(2) / c0)


def test_fit_C2_tight():
    counts = {1: 800, 2: 500, 3: 100}
    c2 = fit_C2(counts, 1000, 0.01)
    assert all(cnt <= c2 * 1000 * math.exp(-0.01 * k) for k, cnt in counts.items())
    assert c2 == pytest.approx(0.8 * math.exp(0.01))
    with pytest.raises(DomainError):
        fit_C2({}, 1000, 0.01)


def test_power_checks():
    assert theorem12_check(6, 1, 2).passed
    assert theorem12_check(2, 1, 1).passed
    assert theorem12_check(105, 1, height_B(105).b_value).passed
    assert prop21_check(105, 1, 2).passed
    assert prop21_check(6, Fraction(1, 10), 2).status == FAIL
    with pytest.raises(DomainError):
        theorem12_check(6, 0, 2)
    with pytest.raises(DomainError):
        prop21_check(1, 1, 1)
