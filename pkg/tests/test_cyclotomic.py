from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from weilval.cyclotomic import (CyclotomicInteger, CyclotomicMismatch, Valuation, add,
                                batch_pi_valuations, from_trace_counts, mul, norm, pi_valuation)

PRIMES = [2, 3, 5, 7, 11, 13]
ALL_METHODS = ("norm", "division", "expansion")


def elements(p, lo=-40, hi=40):
    return st.lists(st.integers(lo, hi), min_size=p - 1, max_size=p - 1).map(
        lambda c: CyclotomicInteger(p, tuple(c)))


def zeta(p, j=1):
    return CyclotomicInteger.zeta_power(p, j)


def one_minus_zeta(p):
    return CyclotomicInteger.from_int(p, 1) - zeta(p)


def test_identities():
    z = CyclotomicInteger(5, (3, -1, 0, 7))
    assert z + CyclotomicInteger.zero(5) == z
    assert (z + (-z)).is_zero()
    assert z * CyclotomicInteger.from_int(5, 1) == z
    two = CyclotomicInteger(3, (1, 1))
    assert add(two, two).coeffs == (2, 2)


def test_zeta_squared_at_three():
    assert mul(zeta(3), zeta(3)).coeffs == (-1, -1)


def test_mismatched_primes():
    with pytest.raises(CyclotomicMismatch):
        add(CyclotomicInteger.zero(3), CyclotomicInteger.zero(5))
    with pytest.raises(CyclotomicMismatch):
        mul(CyclotomicInteger.zero(3), CyclotomicInteger.zero(5))


def test_wrong_length():
    with pytest.raises(ValueError):
        CyclotomicInteger(5, (1, 2))
    with pytest.raises(ValueError):
        from_trace_counts(3, [1, 2])


def test_from_trace_counts():
    assert from_trace_counts(3, [3, 3, 3]).is_zero()
    assert from_trace_counts(2, [6, 2]).as_int() == 4
    assert from_trace_counts(3, [5, 2, 2]).coeffs == (3, 0)


def test_one_minus_zeta_to_the_fourth():
    z = one_minus_zeta(5)
    w = z * z * z * z
    assert norm(w) == 625
    for m in ALL_METHODS:
        assert pi_valuation(w, m) == Valuation(4, 4)


def test_basic_valuations():
    assert pi_valuation(CyclotomicInteger.zero(7)).is_infinite
    v = pi_valuation(one_minus_zeta(3))
    assert (v.numer, v.value) == (1, Fraction(1, 2))
    v = pi_valuation(CyclotomicInteger.from_int(3, 9))
    assert (v.numer, v.value) == (4, 2)
    v = pi_valuation(CyclotomicInteger.from_int(2, -12))
    assert (v.numer, v.value) == (2, 2)


def test_valuation_ordering_and_text():
    assert Valuation(1, 2) < Valuation(2, 2) < Valuation.infinite(2)
    assert Valuation(2, 4) == Valuation(1, 2)
    assert str(Valuation(6, 18)) == "1/3" and str(Valuation.infinite(1)) == "inf"
    with pytest.raises(ValueError):
        Valuation.infinite(4).value


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_norm_matches_sympy_resultant(p):
    x = sympy.symbols("x")
    phi = sympy.cyclotomic_poly(p, x)
    for coeffs in [(1,) + (0,) * (p - 2), tuple(range(1, p)), tuple((-1) ** i * i for i in range(p - 1))]:
        z = CyclotomicInteger(p, coeffs)
        f = sum(c * x**i for i, c in enumerate(coeffs))
        assert norm(z) == sympy.resultant(phi, f, x)


@pytest.mark.parametrize("p", PRIMES)
def test_methods_agree_randomized(p):
    @settings(max_examples=80, deadline=None)
    @given(elements(p))
    def check(z):
        if z.is_zero():
            return
        vals = {pi_valuation(z, m) for m in ALL_METHODS}
        assert len(vals) == 1
    check()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_valuation_is_additive_and_ultrametric(p):
    @settings(max_examples=60, deadline=None)
    @given(elements(p, -9, 9), elements(p, -9, 9))
    def check(z1, z2):
        if z1.is_zero() or z2.is_zero():
            return
        v1, v2 = pi_valuation(z1, "division"), pi_valuation(z2, "division")
        assert pi_valuation(z1 * z2, "division").numer == v1.numer + v2.numer
        s = z1 + z2
        if not s.is_zero():
            assert pi_valuation(s, "division").numer >= min(v1.numer, v2.numer)
    check()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(-10**6, 10**6).filter(bool))
def test_integer_values_use_ordinary_valuation(p, c):
    v = pi_valuation(CyclotomicInteger.from_int(p, c), "norm")
    assert v.value == sympy.multiplicity(p, c)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
def test_batch_matches_scalar(p):
    import numpy as np
    rng = np.random.default_rng(p)
    rows = rng.integers(-30, 30, size=(200, p - 1))
    rows[0] = 0
    rows[1] = p**3
    got = batch_pi_valuations(p, rows, max_numer=6 * (p - 1))
    for row, v in zip(rows.tolist(), got):
        z = CyclotomicInteger(p, tuple(row))
        if z.is_zero():
            assert v is None
        else:
            assert v == pi_valuation(z, "division").numer
