from collections import Counter
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from weilval.conjectures.covering import (METHODS, CertificateError, CoveringPrecondition,
                                          CoveringWitness, analytic_single_digit,
                                          brute_force_witness, canonical_residues,
                                          check_certificate, colin_candidates, covering_scan,
                                          covering_witness, covers, is_eligible, scan_block,
                                          scan_plan, weight_sum_identity)


def test_covers_examples():
    assert covers(2, 3, 1, 5)
    assert covers(5, 3, 0, 77)
    assert not covers(2, 3, 3, 5)
    assert covers(2, 3, 5, 5) and not covers(2, 3, 5, 5, strict=True)


def test_witness_examples():
    w = covering_witness(2, 3, 3)
    assert (w.a, w.b, w.method) == (1, 5, "colin_inverse")
    assert colin_candidates(2, 3, 3) == [0, 2]
    assert check_certificate(2, 3, 3, 4, 5)
    assert brute_force_witness(2, 3, 3) == (1, 3)


def test_gcd_route():
    # gcd(9, 80) = 1 but gcd(10, 80) = 10
    w = covering_witness(3, 4, 10)
    assert w.method == "vincent_gcd" and 10 * w.b % 80 == 0


def test_preconditions():
    for d in (0, 1, 2, 4, 7, 14):
        with pytest.raises(CoveringPrecondition):
            covering_witness(2, 3, d)
    with pytest.raises(CoveringPrecondition):
        covering_witness(1, 3, 2)
    assert not is_eligible(2, 1, 1)


def test_witness_certifies_itself():
    with pytest.raises(CertificateError):
        CoveringWitness(2, 3, 3, 3, 5, "brute_force")
    with pytest.raises(ValueError):
        CoveringWitness(2, 3, 3, 1, 5, "magic")


def _all_eligible(t, n):
    mod = t**n - 1
    return [d for d in range(mod) if is_eligible(t, n, d)]


@pytest.mark.parametrize("t,n", [(2, 4), (2, 6), (3, 3), (5, 2), (6, 2), (10, 2), (3, 4), (2, 8)])
def test_every_eligible_d_has_certified_witness(t, n):
    for d in _all_eligible(t, n):
        w = covering_witness(t, n, d)
        assert check_certificate(t, n, d, w.a, w.b)
        alpha, beta, gamma = weight_sum_identity(t, n, d, w.a, w.b)
        assert alpha + beta + gamma == 2 * n * (t - 1)
        if w.method == "colin_inverse":
            assert brute_force_witness(t, n, d) is not None


@pytest.mark.parametrize("t", [2, 3, 5, 6, 7, 10, 11])
def test_short_lengths_need_no_search(t):
    n = 1
    while t**n <= 20000 and n <= 4:
        for d in _all_eligible(t, n):
            assert covering_witness(t, n, d).method != "brute_force" or n == 4
        n += 1


def test_off_slice_never_needs_brute_force():
    for t in range(3, 12):
        n = 1
        while t**n <= 5000:
            for d in _all_eligible(t, n):
                if d % (t - 1) != 1:
                    assert covering_witness(t, n, d).method != "brute_force"
            n += 1


def test_rotation_invariance():
    for t, n in [(2, 6), (3, 3), (4, 3)]:
        mod = t**n - 1
        for d in _all_eligible(t, n):
            w = covering_witness(t, n, d)
            assert check_certificate(t, n, d * t % mod, w.a, w.b)


def test_canonical_residues():
    assert canonical_residues(2, 3).tolist() == [3]
    assert canonical_residues(2, 1).tolist() == []
    mod = 3**4 - 1
    reps = set(canonical_residues(3, 4).tolist())
    orbits = set()
    for d in _all_eligible(3, 4):
        orbits.add(min(d * 3**k % mod for k in range(4)))
    assert reps == orbits


@pytest.mark.parametrize("t,n", [(2, 10), (3, 6), (7, 3), (12, 2), (40, 2), (6, 4), (2, 12)])
def test_vectorized_block_agrees_with_scalar(t, n):
    blk = scan_block(t, n)
    expected = Counter(covering_witness(t, n, int(d)).method for d in canonical_residues(t, n))
    assert {k: v for k, v in blk.by_method.items() if v} == dict(expected)
    assert blk.ok and blk.certified == blk.classes
    assert blk.coprime == sum(1 for d in canonical_residues(t, n) if gcd(int(d), t**n - 1) == 1)


def test_single_digit_closed_form_matches_blocks():
    agg = analytic_single_digit(20, 60, include_powers=True)
    blocks = [scan_block(t, 1) for t in range(20, 61)]
    assert agg.classes == sum(b.classes for b in blocks)
    for m in METHODS:
        assert agg.by_method[m] == sum(b.by_method[m] for b in blocks)
    skip = analytic_single_digit(20, 60)
    assert skip.classes == agg.classes - (25 - 3) - (27 - 3) - (32 - 3) - (36 - 3) - (49 - 3)


def test_plan_ordering_and_powers():
    plan = scan_plan(300, n1_exhaustive=20, analytic_chunk=100)
    blocks = [u for u in plan if u[0] == "block"]
    assert blocks == sorted(blocks, key=lambda u: (u[1], u[2]))
    assert ("block", 4, 1) not in plan and ("block", 2, 8) in plan
    assert plan[-1] == ("range", 222, 300)
    full = scan_plan(300, include_powers=True, n1_exhaustive=20)
    assert ("block", 4, 4) in full


def test_small_scan():
    r = covering_scan(3000)
    assert r.ok and not r.failures and r.certified == r.classes
    assert r.colin_rate >= 0.99


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 9), st.integers(1, 5), st.data())
def test_random_witnesses(t, n, data):
    mod = t**n - 1
    if mod > 60000 or mod < 3:
        return
    d = data.draw(st.integers(2, mod - 1))
    if not is_eligible(t, n, d):
        return
    w = covering_witness(t, n, d)
    assert check_certificate(t, n, d, w.a, w.b)
