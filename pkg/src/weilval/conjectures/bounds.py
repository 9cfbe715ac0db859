"""Valuation bounds by theorem case, the upper-bound conjecture, and
non-permutation witnesses for ``x -> v (x+1)^d - u x^d``."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd

import numpy as np

from ..arith import divisors, is_power_of_two, least_odd_prime_divisor
from ..cyclotomic import Valuation
from ..finite_field import FieldSpec, FieldTable
from ..families import gerald_family
from ..stickelberger import (ExponentClass, classify_exponent, enumerate_exponent_classes,
                             is_degenerate, v_stickelberger)
from ..weil import ExponentError, binomial_values, check_exponent

DEFAULT_SCAN_CAP = 10**4

CASE_LABELS = ("i", "ii.a", "ii.b", "iii.a", "iii.b")


def configured_scan_cap() -> int:
    return int(os.environ.get("WEILVAL_SCAN_CAP", DEFAULT_SCAN_CAP))


class ScanBudgetError(ValueError):
    pass


def field_valuation(spec: FieldSpec, d: int) -> Valuation:
    """``V_{F,d}``, including the ``q = 2`` case (V = 1)."""
    if spec.q == 2:
        return Valuation(1, 1)
    return v_stickelberger(spec, d)


def theorem_case(cls: ExponentClass) -> tuple[str, Fraction]:
    """Case label and bound, decided only from degeneracy and congruences."""
    p, n = cls.spec.p, cls.spec.n
    if cls.degenerate_over_field:
        return "i", Fraction(n)
    if cls.d % (p - 1) == 1 % (p - 1):
        if is_power_of_two(n):
            return "ii.a", Fraction(n, 2)
        return "ii.b", Fraction(2 * n, 3)
    if p % 4 == 1 and n % 2 == 1 and cls.d % (p - 1) == (p + 1) // 2:
        return "iii.a", Fraction(n, 2)
    return "iii.b", Fraction(ceil(Fraction(p - 1, 3)) * n, p - 1)


@dataclass(frozen=True)
class BoundReport:
    spec: FieldSpec
    d: int
    v: Valuation
    case_label: str
    bound: Fraction
    satisfied: bool
    tight: bool
    degenerate_levels: tuple[int, ...] = ()
    # side conditions: universal 2/3 bound, the power-of-two bound for any
    # nondegenerate d, and the "V = n iff degenerate" / 2/(p-1) floor facts
    side_checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.satisfied and all(self.side_checks.values())


def bound_report(cls: ExponentClass, v: Valuation | None = None) -> BoundReport:
    spec = cls.spec
    p, n, q = spec.p, spec.n, spec.q
    if v is None:
        v = field_valuation(spec, cls.d)
    label, bound = theorem_case(cls)
    val = v.value
    side = {}
    nondeg = not cls.degenerate_over_field
    if nondeg:
        side["universal_two_thirds"] = val <= Fraction(2 * n, 3)
        if n >= 2 and is_power_of_two(n):
            side["power_of_two_half"] = val <= Fraction(n, 2)
        floor_hit = is_degenerate(p, n, (-cls.d) % (q - 1))
        side["floor"] = val >= Fraction(2, p - 1) and ((val == Fraction(2, p - 1)) == floor_hit)
        side["below_n"] = val < n
    else:
        side["degenerate_is_n"] = val == n
    return BoundReport(spec, cls.class_rep, v, label, bound, val <= bound, val == bound,
                       tuple(cls.degenerate_levels), side)


def _check_cap(spec: FieldSpec, cap: int | None) -> None:
    cap = configured_scan_cap() if cap is None else cap
    if spec.q > cap:
        raise ScanBudgetError(f"q = {spec.q} exceeds the scan cap {cap}")


def theorem_cecilia_check(spec: FieldSpec, cap: int | None = None) -> list[BoundReport]:
    """One :class:`BoundReport` per exponent class of F (q >= 3)."""
    if spec.q < 3:
        raise ScanBudgetError("needs q >= 3")
    _check_cap(spec, cap)
    return [bound_report(c) for c in enumerate_exponent_classes(spec)]


@dataclass(frozen=True)
class UBCReport:
    spec: FieldSpec
    ell: int
    bound: Fraction
    classes: int
    max_v: Fraction | None
    attaining: tuple[int, ...]
    gerald_attains: bool
    violations: tuple[int, ...]
    per_class: tuple[tuple[int, Valuation], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def upper_bound_conjecture_scan(spec: FieldSpec, cap: int | None = None) -> UBCReport:
    """Check ``V <= (l+1) n / (2 l)`` for every nondegenerate class."""
    n = spec.n
    ell = least_odd_prime_divisor(n)
    if ell is None:
        raise ValueError(f"n = {n} is a power of 2; the conjecture does not apply")
    _check_cap(spec, cap)
    bound = Fraction((ell + 1) * n, 2 * ell)
    per_class = []
    for c in enumerate_exponent_classes(spec):
        if c.degenerate_over_field:
            continue
        per_class.append((c.class_rep, v_stickelberger(spec, c.d)))
    values = [v.value for _, v in per_class]
    max_v = max(values) if values else None
    attaining = tuple(d for d, v in per_class if v.value == max_v)
    violations = tuple(d for d, v in per_class if v.value > bound)
    gerald_reps = set()
    for row in gerald_family(spec):
        gerald_reps.add(classify_exponent(spec, row.d).class_rep)
    gerald_attains = bool(gerald_reps & set(attaining))
    return UBCReport(spec, ell, bound, len(per_class), max_v, attaining, gerald_attains,
                     violations, tuple(per_class))


# -- property-style checks used by scans ------------------------------------


def subfield_sandwich(spec: FieldSpec, d: int) -> list[tuple[int, Fraction, Fraction, bool]]:
    """For each proper divisor m of n: ``(m, V_K, V_F, V_K <= V_F <= (n/m) V_K)``."""
    p, n = spec.p, spec.n
    v_f = field_valuation(spec, d).value
    rows = []
    for m in divisors(n):
        if m == n:
            continue
        sub = FieldSpec(p, m)
        mod = sub.q - 1
        dk = d % mod if mod > 1 else 1
        v_k = field_valuation(sub, dk).value
        rows.append((m, v_k, v_f, v_k <= v_f <= Fraction(n, m) * v_k))
    return rows


def negation_pair_ok(spec: FieldSpec, d: int) -> bool:
    """``V_{F,d} + V_{F,-d} <= n + 2/(p-1)``."""
    q = spec.q
    if q == 2:
        return True
    total = field_valuation(spec, d).value + field_valuation(spec, (-d) % (q - 1)).value
    return total <= spec.n + Fraction(2, spec.p - 1)


# -- non-permutation witnesses ------------------------------------------------


class DorothyFailure(RuntimeError):
    """No u gives a non-injective binomial; would contradict the universal bound."""


@dataclass(frozen=True)
class DorothyWitness:
    v: int
    u: int
    x1: int
    x2: int


def dorothy_witness(f: FieldTable, d: int, v: int) -> DorothyWitness:
    """Smallest ``u != v`` with ``x -> v (x+1)^d - u x^d`` not injective, plus a collision."""
    check_exponent(f.q, d)
    if v == 0:
        raise ValueError("v must be nonzero")
    if is_degenerate(f.p, f.n, d):
        raise ExponentError(f"d = {d} is degenerate over {f.spec}")
    for u in range(f.q):
        if u == v:
            continue
        vals = binomial_values(f, d, v, u)
        uniq, first_idx = np.unique(vals, return_index=True)
        if len(uniq) == f.q:
            continue
        first_seen = np.full(f.q, -1, dtype=np.int64)
        first_seen[uniq] = first_idx
        clash = np.nonzero(first_seen[vals] != np.arange(f.q))[0]
        if len(clash):
            x2 = int(clash[0])
            x1 = int(first_seen[vals[x2]])
            if vals[x1] != vals[x2] or x1 == x2:
                raise DorothyFailure("collision bookkeeping error")
            return DorothyWitness(v, u, x1, x2)
    raise DorothyFailure(f"every u != v gives a permutation in {f.spec}, d={d}, v={v}")


# -- prime fields and their quadratic extensions --------------------------------


@dataclass(frozen=True)
class EqualityClassification:
    p: int
    bound: Fraction
    considered: tuple[int, ...]
    predicted: frozenset
    measured: frozenset

    @property
    def ok(self) -> bool:
        return self.predicted == self.measured and all(
            v_stickelberger(FieldSpec(self.p, 1), d).value <= self.bound for d in self.considered)


def predicted_prime_field_maximizers(p: int) -> frozenset:
    """Residues d mod p-1 listed as attaining the prime-field bound (p >= 5)."""
    mod = p - 1
    out = set()
    if p % 3 == 1:
        if p % 9 != 7:
            out.add((p + 2) // 3 % mod)
        if p % 9 != 4:
            out.add((2 * p + 1) // 3 % mod)
        if p == 19:
            out |= {5, 11}
    else:
        out.add(3 % mod)
        out.add((2 * p - 1) // 3 % mod)
    return frozenset(d for d in out if gcd(d, mod) == 1 and d % (mod // 2) != 1 % (mod // 2))


def prime_field_equality(p: int) -> EqualityClassification:
    """Compare the exhaustive maximizer set of ``V_{F_p,d}`` with the listed congruences.

    Only d with ``gcd(d, p-1) = 1`` and ``d != 1 mod (p-1)/2`` are considered.
    """
    if p < 5 or p % 2 == 0:
        raise ValueError("needs an odd prime p >= 5")
    spec = FieldSpec(p, 1)
    mod = p - 1
    bound = Fraction(ceil(Fraction(mod, 3)), mod)
    considered = tuple(d for d in range(1, mod)
                       if gcd(d, mod) == 1 and d % (mod // 2) != 1 % (mod // 2))
    measured = frozenset(d for d in considered if v_stickelberger(spec, d).value == bound)
    return EqualityClassification(p, bound, considered, predicted_prime_field_maximizers(p),
                                  measured)


def quadratic_half_check(p: int) -> list[tuple[int, Valuation, bool]]:
    """Over ``F_{p^2}``: every coprime ``d = (p+1)/2 mod p-1`` below ``p^2 - 1`` has V <= 1/2."""
    if p % 4 != 1:
        raise ValueError("needs p = 1 mod 4")
    spec = FieldSpec(p, 2)
    mod = spec.q - 1
    rows = []
    for d in range((p + 1) // 2, mod, p - 1):
        if gcd(d, mod) != 1:
            continue
        v = v_stickelberger(spec, d)
        rows.append((d, v, v.value <= Fraction(1, 2)))
    return rows
