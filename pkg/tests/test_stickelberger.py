from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from weilval.arith import divisors, prime_powers
from weilval.cyclotomic import Valuation
from weilval.finite_field import FieldSpec, build_field
from weilval.stickelberger import (classify_exponent, coprime_residues, digits,
                                   enumerate_exponent_classes, exponent_orbit, is_degenerate,
                                   stickelberger_minimum, v_stickelberger, v_stickelberger_naive,
                                   weight, weight_table)
from weilval.weil import ExponentError, v_direct


def test_weight_examples():
    assert weight(2, 3, 5) == 2
    assert weight(7, 4, 0) == 0
    assert weight(3, 2, 8) == 0  # 8 = 3^2 - 1 is the zero residue
    assert digits(3, 3, 16) == [1, 2, 1]


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 12), st.integers(1, 5), st.data())
def test_weight_complementarity(t, n, data):
    mod = t**n - 1
    if mod < 2:
        return
    a = data.draw(st.integers(1, mod - 1))
    assert weight(t, n, a) + weight(t, n, -a) == n * (t - 1)
    assert 0 <= weight(t, n, a) < n * (t - 1)


def test_weight_table_matches_scalar():
    for t, n in [(2, 5), (3, 3), (5, 2)]:
        tab = weight_table(t, n)
        assert tab.tolist() == [weight(t, n, a) for a in range(t**n - 1)]


def test_named_values():
    assert v_stickelberger(FieldSpec(2, 3), 3) == Valuation(2, 1)
    assert stickelberger_minimum(FieldSpec(2, 3), 3) == (2, 1)
    v = v_stickelberger(FieldSpec(19, 1), 5)
    assert (v.numer, v.denom, v.value) == (6, 18, Fraction(1, 3))
    v = v_stickelberger(FieldSpec(3, 2), 5)
    assert (v.numer, v.value) == (2, 1)


def test_errors():
    with pytest.raises(ExponentError):
        v_stickelberger(FieldSpec(2, 1), 1)
    with pytest.raises(ExponentError):
        v_stickelberger(FieldSpec(3, 2), 2)


@pytest.mark.parametrize("p,n", [(2, 3), (2, 4), (3, 2), (2, 6), (5, 2), (7, 1), (3, 4)])
def test_degenerate_exponents_reach_n(p, n):
    spec = FieldSpec(p, n)
    for k in range(n):
        assert v_stickelberger(spec, p**k).value == n


def test_classify_examples():
    c = classify_exponent(FieldSpec(2, 3), 3)
    assert (c.canonical, c.inverse, c.class_rep) == (3, 5, 3)
    assert not c.degenerate_over_field and c.degenerate_over_prime_field
    c = classify_exponent(FieldSpec(3, 2), 7)
    assert c.canonical == 5 and c.degenerate_over_prime_field
    c = classify_exponent(FieldSpec(5, 4), 1)
    assert all(flag for _, flag in c.degeneracy_profile)
    with pytest.raises(ExponentError):
        classify_exponent(FieldSpec(3, 2), 4)


def test_class_enumeration_examples():
    classes = enumerate_exponent_classes(FieldSpec(2, 3))
    assert [c.class_rep for c in classes] == [1, 3]
    assert [sorted(exponent_orbit(FieldSpec(2, 3), c.d)) for c in classes] == [[1, 2, 4], [3, 5, 6]]
    assert len(enumerate_exponent_classes(FieldSpec(2, 2))) == 1
    assert len(enumerate_exponent_classes(FieldSpec(3, 1))) == 1


@pytest.mark.parametrize("p,n", [(2, 6), (3, 4), (5, 3), (7, 2), (31, 1)])
def test_classes_partition_units(p, n):
    spec = FieldSpec(p, n)
    seen = []
    for c in enumerate_exponent_classes(spec):
        orbit = exponent_orbit(spec, c.d)
        assert c.class_rep == min(orbit) and c.canonical in orbit
        assert gcd(c.canonical, spec.q - 1) == 1
        seen += orbit
        vs = {v_stickelberger(spec, d) for d in orbit}
        assert len(vs) == 1
    assert sorted(seen) == coprime_residues(spec)


@pytest.mark.parametrize("p,n", [(2, 6), (3, 4), (2, 8), (5, 2)])
def test_degeneracy_profile_monotone(p, n):
    spec = FieldSpec(p, n)
    for d in coprime_residues(spec):
        c = classify_exponent(spec, d)
        prof = dict(c.degeneracy_profile)
        assert prof[1] == (d % (p - 1) == 1 % (p - 1))
        for big in divisors(n):
            for small in divisors(big):
                if prof[big]:
                    assert prof[small]


def test_fast_search_matches_naive_and_direct():
    for p, n in prime_powers(3, 200):
        spec = FieldSpec(p, n)
        f = build_field(spec)
        for c in enumerate_exponent_classes(spec):
            fast = v_stickelberger(spec, c.d)
            assert fast == v_stickelberger_naive(spec, c.d)
            assert fast == v_direct(f, c.d)


@pytest.mark.parametrize("p,n", [(2, 5), (3, 3), (2, 6), (5, 2), (7, 2), (11, 1), (3, 4)])
def test_valuation_range_and_floor(p, n):
    spec = FieldSpec(p, n)
    q = spec.q
    floor = Fraction(2, p - 1)
    for d in coprime_residues(spec):
        v = v_stickelberger(spec, d).value
        if is_degenerate(p, n, d):
            assert v == n
        else:
            assert floor <= v < n
            assert (v == floor) == is_degenerate(p, n, (-d) % (q - 1))
        assert v + v_stickelberger(spec, (-d) % (q - 1)).value <= n + floor
