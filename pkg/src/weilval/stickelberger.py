"""Valuations from digit weights, and exponent equivalence classes.

For ``q = p^n > 2`` and ``gcd(d, q-1) = 1``::

    V_{F,d} = m / (p-1),   m = min_{a != 0 mod q-1} wt(a) + wt(-d a)

where ``wt`` is the sum of the base-p digits of the residue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from .arith import divisors
from .cyclotomic import Valuation
from .finite_field import FieldSpec
from .weil import ExponentError, check_exponent

_CHUNK = 4096


def weight(t: int, n: int, a: int) -> int:
    """Sum of the n base-t digits of ``a mod (t^n - 1)`` (0 for the zero residue)."""
    modulus = t**n - 1
    a %= modulus
    if t == 2:
        return a.bit_count()
    s = 0
    while a:
        a, r = divmod(a, t)
        s += r
    return s


def digits(t: int, n: int, a: int) -> list[int]:
    """Standard base-t expansion of ``a mod (t^n - 1)``, least significant digit first."""
    a %= t**n - 1
    out = []
    for _ in range(n):
        a, r = divmod(a, t)
        out.append(r)
    return out


@lru_cache(maxsize=64)
def weight_table(t: int, n: int) -> np.ndarray:
    """``wt_{t,n}(r)`` for every residue ``r in [0, t^n - 1)``."""
    m = t**n - 1
    r = np.arange(m, dtype=np.int64)
    w = np.zeros(m, dtype=np.int64)
    for _ in range(n):
        w += r % t
        r //= t
    w.setflags(write=False)
    return w


@lru_cache(maxsize=64)
def _weight_order(t: int, n: int) -> np.ndarray:
    """Nonzero residues sorted by weight (stable, so ties stay ascending)."""
    w = weight_table(t, n)
    order = np.argsort(w[1:], kind="stable") + 1
    order.setflags(write=False)
    return order


def stickelberger_minimum(spec: FieldSpec, d: int) -> tuple[int, int]:
    """Return ``(m, a)`` where a is the first residue (in weight order) attaining m."""
    p, n, q = spec.p, spec.n, spec.q
    if q == 2:
        raise ExponentError("q = 2 is handled separately (V = 1)")
    check_exponent(q, d)
    mod = q - 1
    w = weight_table(p, n)
    order = _weight_order(p, n)
    dm = d % mod
    best_a = 1
    best = int(w[1] + w[(-dm) % mod])
    for start in range(0, len(order), _CHUNK):
        if best <= 2 or int(w[order[start]]) + 1 >= best:
            break
        a = order[start:start + _CHUNK]
        tot = w[a] + w[(-dm * a) % mod]
        i = int(np.argmin(tot))
        if int(tot[i]) < best:
            best, best_a = int(tot[i]), int(a[i])
    return best, best_a


def v_stickelberger(spec: FieldSpec, d: int) -> Valuation:
    """``V_{F,d}`` from the digit-weight minimum."""
    m, _ = stickelberger_minimum(spec, d)
    return Valuation(m, spec.p - 1)


def v_stickelberger_naive(spec: FieldSpec, d: int) -> Valuation:
    """Plain loop over every nonzero residue, using scalar :func:`weight`."""
    p, n, q = spec.p, spec.n, spec.q
    if q == 2:
        raise ExponentError("q = 2 is handled separately (V = 1)")
    check_exponent(q, d)
    m = min(weight(p, n, a) + weight(p, n, -d * a) for a in range(1, q - 1))
    return Valuation(m, p - 1)


# -- exponent classes --------------------------------------------------------


def is_degenerate(p: int, m: int, d: int) -> bool:
    """True iff d is congruent to a power of p modulo ``p^m - 1``."""
    mod = p**m - 1
    if mod == 1:
        return True
    r = d % mod
    return any(pow(p, k, mod) == r for k in range(m))


def exponent_orbit(spec: FieldSpec, d: int) -> frozenset[int]:
    """Orbit of d under ``d -> p d`` and ``d -> d^{-1}`` modulo q - 1."""
    q, p, n = spec.q, spec.p, spec.n
    mod = q - 1
    if mod == 1:
        return frozenset({1})
    inv = pow(d, -1, mod)
    out = set()
    for base in (d % mod, inv):
        x = base
        for _ in range(n):
            out.add(x)
            x = x * p % mod
    return frozenset(out)


@dataclass(frozen=True)
class ExponentClass:
    spec: FieldSpec
    d: int
    canonical: int
    inverse: int
    degeneracy_profile: tuple[tuple[int, bool], ...]
    class_rep: int = field(compare=False)

    @property
    def degenerate_over_field(self) -> bool:
        return dict(self.degeneracy_profile)[self.spec.n]

    @property
    def degenerate_over_prime_field(self) -> bool:
        return dict(self.degeneracy_profile)[1]

    @property
    def degenerate_levels(self) -> list[int]:
        return [m for m, flag in self.degeneracy_profile if flag]

    def degenerate_over(self, m: int) -> bool:
        return dict(self.degeneracy_profile)[m]


def classify_exponent(spec: FieldSpec, d: int) -> ExponentClass:
    q, p, n = spec.q, spec.p, spec.n
    check_exponent(q, d)
    mod = q - 1
    dr = (d - 1) % mod + 1
    canonical = min((dr * p**k) % mod or mod for k in range(n))
    inverse = pow(dr, -1, mod) if mod > 1 else 1
    inverse = inverse or mod
    profile = tuple((m, is_degenerate(p, m, dr)) for m in divisors(n))
    rep = min(exponent_orbit(spec, dr)) if mod > 1 else 1
    return ExponentClass(spec, dr, canonical, inverse, profile, rep or mod)


def enumerate_exponent_classes(spec: FieldSpec) -> list[ExponentClass]:
    """One :class:`ExponentClass` per orbit, keyed by the smallest member."""
    q = spec.q
    mod = q - 1
    if mod == 1:
        return [classify_exponent(spec, 1)]
    seen: set[int] = set()
    out = []
    for d in range(1, mod):
        if d in seen or gcd(d, mod) != 1:
            continue
        orbit = exponent_orbit(spec, d)
        seen |= orbit
        out.append(classify_exponent(spec, d))
    return out


def coprime_residues(spec: FieldSpec) -> list[int]:
    mod = spec.q - 1
    if mod == 1:
        return [1]
    return [d for d in range(1, mod) if gcd(d, mod) == 1]
