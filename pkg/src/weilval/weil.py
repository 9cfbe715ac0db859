"""Direct exact evaluation of Weil sums of binomials.

``W_{F,d}(a) = sum_{x in F} psi(x^d - a x)`` is obtained by tallying how many
``x`` give each trace value ``j in F_p`` and returning ``sum_j n_j zeta_p^j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import NamedTuple

import numpy as np

from .cyclotomic import CyclotomicInteger, Valuation, batch_pi_valuations, from_trace_counts
from .finite_field import FieldSpec, FieldTable

DEFAULT_DIRECT_CAP = 4096

_CHUNK_CELLS = 1 << 22


class ExponentError(ValueError):
    """Exponent not coprime to q - 1 (or otherwise outside the contract)."""


def check_exponent(q: int, d: int) -> None:
    if d < 1:
        raise ExponentError(f"exponent must be positive, got {d}")
    if gcd(d, q - 1) != 1:
        raise ExponentError(f"gcd({d}, {q - 1}) != 1")


class SpectrumEntry(NamedTuple):
    a: int
    value: CyclotomicInteger
    valuation: Valuation


@dataclass(frozen=True)
class WeilSpectrum:
    spec: FieldSpec
    d: int
    entries: tuple[SpectrumEntry, ...]
    v_direct: Valuation

    def first_moment(self) -> CyclotomicInteger:
        total = CyclotomicInteger.zero(self.spec.p)
        for e in self.entries:
            total = total + e.value
        return total

    def valuation_multiset(self) -> dict[Valuation, int]:
        out: dict[Valuation, int] = {}
        for e in self.entries:
            out[e.valuation] = out.get(e.valuation, 0) + 1
        return out

    def value_multiset(self) -> dict[CyclotomicInteger, int]:
        out: dict[CyclotomicInteger, int] = {}
        for e in self.entries:
            out[e.value] = out.get(e.value, 0) + 1
        return out


def weil_sum(f: FieldTable, d: int, a: int) -> CyclotomicInteger:
    """``W_{F,d}(a)`` by explicit field arithmetic on every x."""
    check_exponent(f.q, d)
    xs = np.arange(f.q, dtype=np.int64)
    vals = f.sub_vec(f.pow_table(d), f.mul_vec(xs, np.int64(a)))
    counts = np.bincount(f.trace_table[vals], minlength=f.p)
    return from_trace_counts(f.p, counts.tolist())


def walsh_sum(f: FieldTable, d: int, u: int, a: int) -> CyclotomicInteger:
    """``sum_x psi(u x^d - a x)`` by explicit field arithmetic."""
    check_exponent(f.q, d)
    xs = np.arange(f.q, dtype=np.int64)
    vals = f.sub_vec(f.mul_vec(f.pow_table(d), np.int64(u)), f.mul_vec(xs, np.int64(a)))
    counts = np.bincount(f.trace_table[vals], minlength=f.p)
    return from_trace_counts(f.p, counts.tolist())


def _trace_counts(f: FieldTable, d: int, u: int, a_values: np.ndarray) -> np.ndarray:
    """Trace-value tallies of ``u x^d - a x`` for each a, shape ``(len(a_values), p)``.

    Uses ``Tr(u x^d - a x) = Tr(u x^d) - Tr(a x)``; with ``x = g^k`` both
    terms are lookups into ``k -> Tr(g^k)``.
    """
    q, p = f.q, f.p
    m = q - 1
    tr_exp = f.trace_table[f.exp_table]
    k = np.arange(m, dtype=np.int64)
    if u == 0:
        first = np.zeros(m, dtype=np.int64)
    else:
        first = tr_exp[(f.log_table[u] + k * (d % m)) % m]
    out = np.zeros((len(a_values), p), dtype=np.int64)
    rows = max(1, _CHUNK_CELLS // max(m, 1))
    for start in range(0, len(a_values), rows):
        block = np.asarray(a_values[start:start + rows], dtype=np.int64)
        second = np.zeros((len(block), m), dtype=np.int64)
        nz = block != 0
        if nz.any():
            la = f.log_table[block[nz]]
            second[nz] = tr_exp[(la[:, None] + k[None, :]) % m]
        diff = (first[None, :] - second) % p
        offs = diff + p * np.arange(len(block), dtype=np.int64)[:, None]
        counts = np.bincount(offs.ravel(), minlength=p * len(block)).reshape(len(block), p)
        out[start:start + len(block)] = counts
    out[:, 0] += 1  # x = 0
    return out


def _to_power_basis(counts: np.ndarray) -> np.ndarray:
    return counts[:, :-1] - counts[:, -1:]


def walsh_vector(f: FieldTable, d: int, u: int) -> list[CyclotomicInteger]:
    """``[sum_x psi(u x^d - a x) for a in F]`` (the two-coefficient generalization)."""
    check_exponent(f.q, d)
    counts = _trace_counts(f, d, u, np.arange(f.q, dtype=np.int64))
    coeffs = _to_power_basis(counts)
    return [CyclotomicInteger(f.p, tuple(int(c) for c in row)) for row in coeffs]


def weil_spectrum(f: FieldTable, d: int, direct_cap: int | None = None) -> WeilSpectrum:
    """All ``q`` Weil sums for exponent d with exact valuations and their minimum."""
    check_exponent(f.q, d)
    if direct_cap is not None and f.q > direct_cap:
        raise ExponentError(f"q = {f.q} exceeds the direct cap {direct_cap}")
    p, n = f.p, f.n
    a_values = np.arange(f.q, dtype=np.int64)
    coeffs = _to_power_basis(_trace_counts(f, d, 1, a_values))
    numers = batch_pi_valuations(p, coeffs, max_numer=n * (p - 1))
    entries = []
    for a, row, num in zip(a_values.tolist(), coeffs.tolist(), numers):
        entries.append(SpectrumEntry(a, CyclotomicInteger(p, tuple(row)), Valuation(num, p - 1)))
    finite = [num for num in numers if num is not None]
    v_direct = Valuation(min(finite), p - 1)
    return WeilSpectrum(f.spec, d, tuple(entries), v_direct)


def v_direct(f: FieldTable, d: int) -> Valuation:
    """``min_a val_p(W_{F,d}(a))`` without materializing the entry list."""
    check_exponent(f.q, d)
    p, n = f.p, f.n
    coeffs = _to_power_basis(_trace_counts(f, d, 1, np.arange(1, f.q, dtype=np.int64)))
    numers = batch_pi_valuations(p, coeffs, max_numer=n * (p - 1))
    return Valuation(min(v for v in numers if v is not None), p - 1)


def binomial_values(f: FieldTable, d: int, v: int, u: int) -> np.ndarray:
    """``x -> v (x+1)^d - u x^d`` on every element, as an index array."""
    xs = np.arange(f.q, dtype=np.int64)
    pw = f.pow_table(d)
    shifted = pw[f.add_vec(xs, np.int64(1))]
    return f.sub_vec(f.mul_vec(shifted, np.int64(v)), f.mul_vec(pw, np.int64(u)))


def fiber_sizes(f: FieldTable, d: int, u: int, v: int) -> np.ndarray:
    """``N(u, v, w)`` for every w at once."""
    return np.bincount(binomial_values(f, d, v, u), minlength=f.q)


def count_N(f: FieldTable, d: int, u: int, v: int, w: int) -> int:
    """``#{x in F : v (x+1)^d - u x^d = w}``."""
    check_exponent(f.q, d)
    return int(np.count_nonzero(binomial_values(f, d, v, u) == w))
