import cmath
import itertools
from math import gcd

import numpy as np
import pytest

from weilval.cyclotomic import CyclotomicInteger, Valuation, pi_valuation
from weilval.finite_field import FieldSpec, build_field, irreducible_polynomials
from weilval.weil import (ExponentError, count_N, fiber_sizes, v_direct, walsh_sum, walsh_vector,
                          weil_spectrum, weil_sum)

FIELDS = [(2, 2), (2, 3), (2, 4), (3, 2), (5, 1), (7, 1), (3, 3), (5, 2)]


def coprime_exponents(q):
    return [d for d in range(1, q - 1 if q > 2 else 2) if gcd(d, q - 1) == 1]


def numeric(z: CyclotomicInteger) -> complex:
    w = cmath.exp(2j * cmath.pi / z.p)
    return sum(c * w**i for i, c in enumerate(z.coeffs))


def float_weil_sum(f, d, a):
    """Sum of complex exponentials, using only scalar field operations."""
    w = cmath.exp(2j * cmath.pi / f.p)
    return sum(w ** f.trace(f.sub(f.pow(x, d), f.mul(a, x))) for x in range(f.q))


def test_linear_exponent_over_f4(field_cache):
    f = field_cache(2, 2)
    assert [weil_sum(f, 1, a).as_int() for a in range(4)] == [0, 4, 0, 0]
    sp = weil_spectrum(f, 1)
    assert sp.v_direct == Valuation(2, 1)


def test_zero_coefficient_vanishes(field_cache):
    for p, n in FIELDS:
        f = field_cache(p, n)
        for d in coprime_exponents(f.q)[:3]:
            assert weil_sum(f, d, 0).is_zero()
            assert weil_spectrum(f, d).entries[0].valuation.is_infinite


def test_gold_cube_over_f8(field_cache):
    f = field_cache(2, 3)
    values = sorted(weil_sum(f, 3, a).as_int() for a in range(8))
    assert values == [-4, 0, 0, 0, 0, 4, 4, 4]
    assert weil_spectrum(f, 3).v_direct == Valuation(2, 1)


def test_f9_exponent_five(field_cache):
    assert weil_spectrum(field_cache(3, 2), 5).v_direct == Valuation(2, 2)


def test_rejects_noncoprime(field_cache):
    with pytest.raises(ExponentError):
        weil_sum(field_cache(3, 2), 2, 1)
    with pytest.raises(ExponentError):
        weil_spectrum(field_cache(2, 4), 5)
    with pytest.raises(ExponentError):
        weil_spectrum(field_cache(2, 4), 7, direct_cap=8)


@pytest.mark.parametrize("p,n", FIELDS)
def test_exact_sums_match_complex_evaluation(field_cache, p, n):
    f = field_cache(p, n)
    for d in coprime_exponents(f.q)[:4]:
        sp = weil_spectrum(f, d)
        for a in range(f.q):
            assert abs(numeric(sp.entries[a].value) - float_weil_sum(f, d, a)) < 1e-6
            assert sp.entries[a].value == weil_sum(f, d, a)


@pytest.mark.parametrize("p,n", FIELDS)
def test_spectrum_invariants(field_cache, p, n):
    f = field_cache(p, n)
    for d in coprime_exponents(f.q):
        sp = weil_spectrum(f, d)
        assert [e.a for e in sp.entries] == list(range(f.q))
        assert sp.first_moment().as_int() == f.q
        finite = [e.valuation for e in sp.entries if not e.valuation.is_infinite]
        assert sp.v_direct == min(finite) and sp.v_direct.value <= n
        for e in sp.entries[:12]:
            assert e.valuation == pi_valuation(e.value, "norm")
        assert v_direct(f, d) == sp.v_direct


@pytest.mark.parametrize("p,n", [(2, 4), (3, 2), (5, 2), (3, 3)])
def test_frobenius_and_inversion_invariance(field_cache, p, n):
    f = field_cache(p, n)
    q = f.q
    for d in coprime_exponents(q):
        base = weil_spectrum(f, d)
        frob = weil_spectrum(f, d * p % (q - 1))
        assert [e.value for e in base.entries] == [e.value for e in frob.entries]
        inv = weil_spectrum(f, pow(d, -1, q - 1))
        assert inv.valuation_multiset() == base.valuation_multiset()


@pytest.mark.parametrize("p,n", [(2, 4), (3, 2), (2, 5)])
def test_representation_independence(p, n):
    spec = FieldSpec(p, n)
    mods = list(itertools.islice(irreducible_polynomials(p, n), 3))
    fields = [build_field(spec, modulus=m) for m in mods]
    for d in coprime_exponents(spec.q):
        multisets = [weil_spectrum(f, d).valuation_multiset() for f in fields]
        values = [weil_spectrum(f, d).value_multiset() for f in fields]
        assert all(m == multisets[0] for m in multisets)
        assert all(v == values[0] for v in values)


def test_walsh_vector_matches_scalar(field_cache):
    f = field_cache(3, 2)
    for u in range(f.q):
        vec = walsh_vector(f, 5, u)
        assert vec == [walsh_sum(f, 5, u, a) for a in range(f.q)]
    assert [z.as_int() for z in walsh_vector(f, 5, 0)] == [9] + [0] * 8


def test_fiber_counts(field_cache):
    f = field_cache(2, 3)
    assert fiber_sizes(f, 3, 0, 1).tolist() == [1] * 8
    for u, v in itertools.product(range(8), repeat=2):
        assert fiber_sizes(f, 3, u, v).sum() == 8
        assert count_N(f, 3, u, v, 5) == fiber_sizes(f, 3, u, v)[5]
    for v in range(1, 8):
        assert count_N(f, 3, v, v, v) >= 1


@pytest.mark.parametrize("p,n,d", [(2, 3, 3), (3, 2, 5), (5, 1, 3)])
def test_triple_product_identity_small(field_cache, p, n, d):
    f = field_cache(p, n)
    q = f.q
    hat = [walsh_vector(f, d, u) for u in range(q)]
    for u, v, w in itertools.product(range(q), repeat=3):
        total = CyclotomicInteger.zero(p)
        for a in range(q):
            total = total + hat[u][a] * hat[v][a] * hat[w][a]
        expected = q * q * ((u == v) - 1 + count_N(f, d, u, v, w))
        assert total == CyclotomicInteger.from_int(p, expected)


def test_integer_arrays_for_binary_fields(field_cache):
    f = field_cache(2, 4)
    sp = weil_spectrum(f, 7)
    ints = np.array([e.value.as_int() for e in sp.entries])
    assert (ints**2).sum() == 16**2
