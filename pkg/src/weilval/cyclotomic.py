"""Exact arithmetic in Z[zeta_p] and the extended p-adic valuation.

Elements are stored in the power basis ``1, zeta, ..., zeta^(p-2)`` with
arbitrary-precision integer coefficients, which makes the representation
canonical.  Valuations are kept in units of ``1/(p-1)`` so that
``val(1 - zeta) = 1/(p-1)`` is the integer 1.

Three independent valuation routines are provided:

* :func:`pi_valuation` (default ``method="norm"``) takes the ordinary p-adic
  valuation of the absolute norm, i.e. ``Res(Phi_p, f)``;
* ``method="division"`` divides by ``pi = 1 - zeta`` until it no longer divides;
* ``method="expansion"`` rewrites the element in the basis
  ``1, pi, ..., pi^(p-2)``, where the terms have pairwise distinct valuations.

:func:`batch_pi_valuations` is the vectorized form of the expansion route
used for whole Weil spectra.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Sequence

import numpy as np

from .arith import p_adic_valuation


@total_ordering
@dataclass(frozen=True)
class Valuation:
    """Exact valuation ``numer / denom``; ``numer is None`` encodes infinity."""

    numer: int | None
    denom: int

    @classmethod
    def infinite(cls, denom: int) -> "Valuation":
        return cls(None, denom)

    @property
    def is_infinite(self) -> bool:
        return self.numer is None

    @property
    def value(self) -> Fraction:
        if self.numer is None:
            raise ValueError("infinite valuation has no rational value")
        return Fraction(self.numer, self.denom)

    def _key(self) -> tuple[int, Fraction]:
        return (1, Fraction(0)) if self.numer is None else (0, self.value)

    def __lt__(self, other: "Valuation") -> bool:
        if not isinstance(other, Valuation):
            return NotImplemented
        return self._key() < other._key()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Valuation):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __str__(self) -> str:
        if self.numer is None:
            return "inf"
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


class CyclotomicMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CyclotomicInteger:
    """``sum_i coeffs[i] * zeta_p^i`` with ``len(coeffs) == p - 1``."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.p - 1:
            raise ValueError(f"expected {self.p - 1} coefficients for p={self.p}, got {len(self.coeffs)}")

    @classmethod
    def zero(cls, p: int) -> "CyclotomicInteger":
        return cls(p, (0,) * (p - 1))

    @classmethod
    def from_int(cls, p: int, c: int) -> "CyclotomicInteger":
        return cls(p, (int(c),) + (0,) * (p - 2))

    @classmethod
    def zeta_power(cls, p: int, j: int) -> "CyclotomicInteger":
        counts = [0] * p
        counts[j % p] = 1
        return from_trace_counts(p, counts)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def as_int(self) -> int | None:
        """The rational integer value, or None if the element is not in Z."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def _same(self, other: "CyclotomicInteger") -> None:
        if self.p != other.p:
            raise CyclotomicMismatch(f"p={self.p} vs p={other.p}")

    def __add__(self, other: "CyclotomicInteger") -> "CyclotomicInteger":
        return add(self, other)

    def __neg__(self) -> "CyclotomicInteger":
        return CyclotomicInteger(self.p, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "CyclotomicInteger") -> "CyclotomicInteger":
        return add(self, -other)

    def __mul__(self, other: "CyclotomicInteger | int") -> "CyclotomicInteger":
        if isinstance(other, int):
            return CyclotomicInteger(self.p, tuple(c * other for c in self.coeffs))
        return mul(self, other)

    __rmul__ = __mul__

    def __str__(self) -> str:
        terms = [f"{c}*z^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def add(z1: CyclotomicInteger, z2: CyclotomicInteger) -> CyclotomicInteger:
    z1._same(z2)
    return CyclotomicInteger(z1.p, tuple(a + b for a, b in zip(z1.coeffs, z2.coeffs)))


def _reduce(p: int, poly: Sequence[int]) -> tuple[int, ...]:
    """Reduce a polynomial in zeta using zeta^p = 1, then zeta^(p-1) = -(1 + ... + zeta^(p-2))."""
    folded = [0] * p
    for i, c in enumerate(poly):
        folded[i % p] += c
    top = folded[p - 1]
    return tuple(folded[i] - top for i in range(p - 1))


def mul(z1: CyclotomicInteger, z2: CyclotomicInteger) -> CyclotomicInteger:
    z1._same(z2)
    p = z1.p
    if p == 2:
        return CyclotomicInteger(2, (z1.coeffs[0] * z2.coeffs[0],))
    prod = [0] * (2 * p - 3)
    for i, a in enumerate(z1.coeffs):
        if a:
            for j, b in enumerate(z2.coeffs):
                prod[i + j] += a * b
    return CyclotomicInteger(p, _reduce(p, prod))


def from_trace_counts(p: int, counts: Sequence[int]) -> CyclotomicInteger:
    """``sum_j counts[j] * zeta^j``; coefficient i is ``counts[i] - counts[p-1]``."""
    if len(counts) != p:
        raise ValueError(f"expected {p} counts, got {len(counts)}")
    top = int(counts[p - 1])
    return CyclotomicInteger(p, tuple(int(counts[i]) - top for i in range(p - 1)))


# -- norm ----------------------------------------------------------------


def _bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; exact integer determinant."""
    m = [row[:] for row in m]
    size = len(m)
    sign, prev = 1, 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return sign * m[size - 1][size - 1]


def norm(z: CyclotomicInteger) -> int:
    """Absolute norm ``N(z) = Res(Phi_p, f)`` as the determinant of multiplication by z."""
    p = z.p
    if p == 2:
        return z.coeffs[0]
    cols = []
    for i in range(p - 1):
        shifted = [0] * i + list(z.coeffs)
        cols.append(_reduce(p, shifted))
    mat = [[cols[c][r] for c in range(p - 1)] for r in range(p - 1)]
    return _bareiss_det(mat)


# -- valuations ----------------------------------------------------------


def _valuation_norm(z: CyclotomicInteger) -> int:
    return p_adic_valuation(norm(z), z.p)


def _valuation_division(z: CyclotomicInteger) -> int:
    p = z.p
    if p == 2:
        return p_adic_valuation(z.coeffs[0], 2)
    # lift to Z[x]/(x^p - 1) with coefficient of x^(p-1) equal to 0
    poly = list(z.coeffs) + [0]
    v = 0
    while True:
        # adding k * (1 + x + ... + x^(p-1)) makes the value at x=1 vanish
        s = sum(poly)
        if s % p:
            return v
        k = -s // p
        poly = [c + k for c in poly]
        # exact division by (1 - x) in Z[x]/(x^p - 1): q_i = sum_{j<=i} c_j
        quot, run = [], 0
        for c in poly:
            run += c
            quot.append(run)
        if quot[-1] != 0:
            raise ArithmeticError("division by 1 - zeta left a remainder")
        poly = quot
        v += 1


@lru_cache(maxsize=None)
def _pi_basis_matrix(p: int) -> tuple[tuple[int, ...], ...]:
    """Row i holds the coefficients of zeta^i = (1 - pi)^i in powers of pi."""
    rows = []
    for i in range(p - 1):
        row = [0] * (p - 1)
        c = 1
        for k in range(i + 1):
            row[k] = c if k % 2 == 0 else -c
            c = c * (i - k) // (k + 1)
        rows.append(tuple(row))
    return tuple(rows)


def _valuation_expansion(z: CyclotomicInteger) -> int:
    p = z.p
    if p == 2:
        return p_adic_valuation(z.coeffs[0], 2)
    mat = _pi_basis_matrix(p)
    best = None
    for k in range(p - 1):
        s = sum(z.coeffs[i] * mat[i][k] for i in range(k, p - 1))
        if s:
            v = (p - 1) * p_adic_valuation(s, p) + k
            best = v if best is None else min(best, v)
    return best


_METHODS = {
    "norm": _valuation_norm,
    "division": _valuation_division,
    "expansion": _valuation_expansion,
}


def pi_valuation(z: CyclotomicInteger, method: str = "norm") -> Valuation:
    """Valuation of z in units of ``1/(p-1)``; Infinite iff ``z == 0``."""
    if z.is_zero():
        return Valuation.infinite(z.p - 1)
    try:
        fn = _METHODS[method]
    except KeyError:
        raise ValueError(f"unknown valuation method {method!r}") from None
    return Valuation(fn(z), z.p - 1)


def pi_valuation_by_division(z: CyclotomicInteger) -> Valuation:
    return pi_valuation(z, "division")


@lru_cache(maxsize=64)
def _pi_basis_matrix_mod(p: int, modulus: int) -> np.ndarray:
    return np.array(_pi_basis_matrix(p), dtype=object).astype(object) % modulus


def batch_pi_valuations(p: int, coeffs: np.ndarray, max_numer: int) -> list[int | None]:
    """Valuation numerators for many elements of Z[zeta_p] at once.

    ``coeffs`` has shape ``(m, p-1)``.  The caller guarantees that every
    nonzero input has valuation numerator ``<= max_numer``; Weil sums over
    F_{p^n} satisfy this with ``max_numer = n (p - 1)`` because every complex
    conjugate has absolute value at most q.  Under that guarantee it suffices
    to know the pi-adic coordinates modulo ``p^(e+1)`` with
    ``e = max_numer // (p-1)``, which keeps the arithmetic in int64.
    Returns None for zero rows.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64)
    zero_rows = ~coeffs.any(axis=1)
    if p == 2:
        out: list[int | None] = []
        for c, z in zip(coeffs[:, 0].tolist(), zero_rows.tolist()):
            out.append(None if z else p_adic_valuation(c, 2))
        return out
    e = max_numer // (p - 1)
    modulus = p ** (e + 1)
    mat = _pi_basis_matrix_mod(p, modulus)
    bound = (p - 1) * modulus * modulus
    if bound < 2**53:
        # every partial sum is an integer below 2^53, so BLAS float64 is exact
        s = ((coeffs % modulus).astype(np.float64) @ mat.astype(np.float64))
        s = s.astype(np.int64) % modulus
    elif bound < 2**62:
        s = (coeffs % modulus) @ mat.astype(np.int64) % modulus
    else:
        s = ((coeffs % modulus).astype(object) @ mat) % modulus
        s = s.astype(np.int64)
    # v_p of each coordinate, capped at e + 1 for residues that are 0
    vp = np.zeros(s.shape, dtype=np.int64)
    rem = s.copy()
    for _ in range(e + 1):
        div = (rem % p == 0)
        vp += div
        rem = np.where(div, rem // p, rem)
    vp[s == 0] = e + 1
    cand = (p - 1) * vp + np.arange(p - 1, dtype=np.int64)[None, :]
    best = cand.min(axis=1)
    out = []
    for b, z in zip(best.tolist(), zero_rows.tolist()):
        if z:
            out.append(None)
        elif b > max_numer:
            raise ArithmeticError("valuation exceeds the caller-supplied bound")
        else:
            out.append(int(b))
    return out
