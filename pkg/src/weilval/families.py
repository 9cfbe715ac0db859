"""Named exponent families with known extremal valuations.

Each constructor returns :class:`FamilyPrediction` rows.  A row is emitted
for every member of the family whether or not its hypotheses hold; rows
whose hypotheses fail carry ``applicable=False`` and the failed condition in
``reason``.  :func:`verify_prediction` checks an applicable row against the
digit-weight valuation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import integer_sqrt_exact, is_power_of_two, least_odd_prime_divisor
from .cyclotomic import Valuation
from .finite_field import FieldSpec
from .stickelberger import is_degenerate, v_stickelberger

FAMILY_NAMES = (
    "gerald_gold", "gerald_kasami",
    "nora_case1", "nora_case2", "nora_case3",
    "nancy_quadratic", "peter_cubic", "paul_cubic",
    "raphael_cube", "raphael_cube_inverse",
)


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class FamilyPrediction:
    family_name: str
    spec: FieldSpec
    d: int | None
    applicable: bool
    reason: str
    predicted_v: Fraction | None
    # (level m, expected "d is degenerate over F_{p^m}")
    degeneracy_claim: tuple[tuple[int, bool], ...] = ()
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class FamilyCheck:
    prediction: FamilyPrediction
    coprime: bool
    degeneracy_ok: bool
    measured: Valuation | None
    match: bool


def _row(name, spec, d, ok, reason, v, claim=(), notes=()):
    return FamilyPrediction(name, spec, d, ok, reason,
                            v if ok else None, tuple(claim), tuple(notes))


def gerald_family(spec: FieldSpec) -> list[FamilyPrediction]:
    p, n = spec.p, spec.n
    ell = least_odd_prime_divisor(n)
    if ell is None:
        raise FamilyError(f"n = {n} is a power of 2; no odd prime divisor")
    k = n // ell
    v = Fraction(n * (ell + 1), 2 * ell)
    claim = ((n, False), (1, True))
    if p == 2:
        gold = 2**k + 1
    else:
        gold = (p ** (2 * k) + 1) // 2
    kasami = p ** (2 * k) - p**k + 1
    reason = f"least odd prime divisor of n is {ell}"
    return [
        _row("gerald_gold", spec, gold, True, reason, v, claim),
        _row("gerald_kasami", spec, kasami, True, reason, v, claim),
    ]


def nora_family(spec: FieldSpec) -> list[FamilyPrediction]:
    n, q = spec.n, spec.q
    if not (n >= 2 and is_power_of_two(n)):
        raise FamilyError(f"n = {n} is not 2^s with s >= 1")
    if q <= 4:
        raise FamilyError("needs q > 4")
    r = integer_sqrt_exact(q)
    v = Fraction(n, 2)
    claim = ((n // 2, True), (n, False))
    rows = []

    ok1 = r % 3 in (0, 1)
    d1 = q - r + 1
    rows.append(_row(
        "nora_case1", spec, d1, ok1,
        f"sqrt(q) mod 3 = {r % 3}" + ("" if ok1 else " not in {0,1}"), v, claim,
        notes=(f"uses d = q - sqrt(q) + 1 = {d1}; the variant q - sqrt(q) - 1 = {q - r - 1} "
               f"is reported by nora_statement_variant",),
    ))

    ok2 = r % 9 in (2, 8)
    rows.append(_row(
        "nora_case2", spec, (q + 2) // 3 if (q + 2) % 3 == 0 else None, ok2,
        f"sqrt(q) mod 9 = {r % 9}" + ("" if ok2 else " not in {2,8}"), v, claim,
    ))

    ok3 = r % 9 in (5, 8)
    rows.append(_row(
        "nora_case3", spec, (2 * q + 1) // 3 if (2 * q + 1) % 3 == 0 else None, ok3,
        f"sqrt(q) mod 9 = {r % 9}" + ("" if ok3 else " not in {5,8}"), v, claim,
    ))
    return rows


def nora_statement_variant(spec: FieldSpec) -> dict:
    """Evaluate the alternative first-case exponent ``q - sqrt(q) - 1``.

    Reports whether it is coprime to q-1, degenerate over the subfield of
    order sqrt(q), nondegenerate over F, and whether its valuation is n/2.
    """
    p, n, q = spec.p, spec.n, spec.q
    r = integer_sqrt_exact(q)
    d = q - r - 1
    out = {"d": d, "condition": r % 3 in (0, 1), "coprime": gcd(d, q - 1) == 1}
    if out["coprime"]:
        out["degenerate_over_half"] = is_degenerate(p, n // 2, d)
        out["nondegenerate_over_field"] = not is_degenerate(p, n, d)
        out["v"] = v_stickelberger(spec, d).value
        out["matches_family"] = (out["degenerate_over_half"] and out["nondegenerate_over_field"]
                                and out["v"] == Fraction(n, 2))
    else:
        out["matches_family"] = False
    return out


def prime_level_families(spec: FieldSpec) -> list[FamilyPrediction]:
    p, n, q = spec.p, spec.n, spec.q
    if p == 2:
        raise FamilyError("these families need odd p")
    rows = []

    ok = q % 4 == 1
    rows.append(_row("nancy_quadratic", spec, (q + 1) // 2, ok,
                     f"q mod 4 = {q % 4}" + ("" if ok else " != 1"),
                     Fraction(n, 2), ((1, n % 2 == 0),)))

    p1 = p % 3 == 1
    ok = p1 and q % 9 in (1, 4)
    why = f"p mod 3 = {p % 3}, q mod 9 = {q % 9}"
    rows.append(_row("peter_cubic", spec, (q + 2) // 3 if p1 else None, ok,
                     why + ("" if ok else " (need p = 1 mod 3, q mod 9 in {1,4})"),
                     Fraction(n, 3), ((1, n % 3 == 0),)))
    ok = p1 and q % 9 in (1, 7)
    rows.append(_row("paul_cubic", spec, (2 * q + 1) // 3 if p1 else None, ok,
                     why + ("" if ok else " (need p = 1 mod 3, q mod 9 in {1,7})"),
                     Fraction(n, 3), ((1, n % 3 == 0),)))

    ok = p % 3 == 2 and q % 3 == 2
    why = f"p mod 3 = {p % 3}, q mod 3 = {q % 3}"
    v = Fraction(n * (p + 1), 3 * (p - 1))
    rows.append(_row("raphael_cube", spec, 3, ok,
                     why + ("" if ok else " (need p = 2 mod 3 and q = 2 mod 3)"), v, ((1, False),)))
    rows.append(_row("raphael_cube_inverse", spec, (2 * q - 1) // 3 if q % 3 == 2 else None, ok,
                     why + ("" if ok else " (need p = 2 mod 3 and q = 2 mod 3)"), v, ((1, False),)))
    return rows


def all_families(spec: FieldSpec) -> list[FamilyPrediction]:
    """Every family whose structural precondition on (p, n) holds."""
    rows: list[FamilyPrediction] = []
    if least_odd_prime_divisor(spec.n) is not None:
        rows += gerald_family(spec)
    if spec.n >= 2 and is_power_of_two(spec.n) and spec.q > 4:
        rows += nora_family(spec)
    if spec.p != 2:
        rows += prime_level_families(spec)
    return rows


def verify_prediction(pred: FamilyPrediction) -> FamilyCheck:
    spec = pred.spec
    if not pred.applicable:
        return FamilyCheck(pred, False, False, None, False)
    d = pred.d
    coprime = gcd(d, spec.q - 1) == 1
    if not coprime:
        return FamilyCheck(pred, False, False, None, False)
    degeneracy_ok = all(is_degenerate(spec.p, m, d) == flag for m, flag in pred.degeneracy_claim)
    measured = v_stickelberger(spec, d)
    match = degeneracy_ok and measured.value == pred.predicted_v
    return FamilyCheck(pred, coprime, degeneracy_ok, measured, match)
