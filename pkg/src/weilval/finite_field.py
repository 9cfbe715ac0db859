"""Explicit finite fields F_{p^n} backed by exp/log/trace tables.

Elements are dense integer indices in ``[0, q)``: the index of
``c_0 + c_1 x + ... + c_{n-1} x^{n-1}`` (reduced modulo the defining
polynomial) is ``c_0 + c_1 p + ... + c_{n-1} p^{n-1}``.  Index 0 is zero and
index 1 is one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .arith import factorize, is_prime, prime_divisors

DEFAULT_Q_MAX = 2**20


def configured_q_max() -> int:
    return int(os.environ.get("WEILVAL_TABLE_MAX", DEFAULT_Q_MAX))


class FieldError(ValueError):
    """Invalid field parameters (composite p, q above the cap, ...)."""


class FieldDefect(RuntimeError):
    """A field table failed one of its build-time consistency checks."""


@dataclass(frozen=True, order=True)
class FieldSpec:
    p: int
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not isinstance(self.n, int):
            raise FieldError("p and n must be integers")
        if self.n < 1:
            raise FieldError(f"extension degree must be >= 1, got {self.n}")
        if not is_prime(self.p):
            raise FieldError(f"characteristic {self.p} is not prime")

    @property
    def q(self) -> int:
        return self.p**self.n

    def __str__(self) -> str:
        return f"F_{self.p}^{self.n}" if self.n > 1 else f"F_{self.p}"


# -- polynomials over F_p, coefficient lists low degree first ----------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _polymulmod(a: Sequence[int], b: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    return _polymod(prod, f, p)


def _polypowmod(a: Sequence[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _polymod(list(a), f, p)
    while e:
        if e & 1:
            result = _polymulmod(result, base, f, p)
        base = _polymulmod(base, base, f, p)
        e >>= 1
    return result


def _polygcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _polymod(a, b, p)
    return a


def _polysub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] -= c
    return _trim([c % p for c in out])


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin test for a monic polynomial ``f`` (low degree first) over F_p.

    ``f`` is irreducible iff ``x^(p^n) = x (mod f)`` and
    ``gcd(x^(p^(n/r)) - x, f) = 1`` for every prime ``r | n``.
    """
    n = len(f) - 1
    if n < 1 or f[-1] % p != 1:
        return False
    if n == 1:
        return True
    x = [0, 1]

    def frob(k: int) -> list[int]:
        y = x
        for _ in range(k):
            y = _polypowmod(y, p, f, p)
        return y

    if _polysub(frob(n), x, p):
        return False
    for r in prime_divisors(n):
        g = _polygcd(list(f), _polysub(frob(n // r), x, p), p)
        if len(g) > 1:
            return False
    return True


def irreducible_polynomials(p: int, n: int) -> Iterator[tuple[int, ...]]:
    """Monic irreducible degree-n polynomials in ascending order of the
    integer ``c_0 + c_1 p + ... + c_{n-1} p^{n-1}`` of their lower coefficients."""
    for code in range(p**n):
        coeffs = []
        c = code
        for _ in range(n):
            coeffs.append(c % p)
            c //= p
        f = tuple(coeffs) + (1,)
        if is_irreducible(f, p):
            yield f


# -- the field table ---------------------------------------------------------


class FieldTable:
    """A concrete finite field with exp/log/trace lookup tables.

    Immutable after construction; every table is a read-only numpy array.
    """

    def __init__(self, spec: FieldSpec, modulus: tuple[int, ...], generator: int,
                 exp_table: np.ndarray, log_table: np.ndarray,
                 trace_table: np.ndarray, digits: np.ndarray):
        self.spec = spec
        self.modulus = modulus
        self.generator = generator
        self.exp_table = exp_table
        self.log_table = log_table
        self.trace_table = trace_table
        self.digits = digits
        self._place = np.array([spec.p**i for i in range(spec.n)], dtype=np.int64)
        for arr in (exp_table, log_table, trace_table, digits):
            arr.setflags(write=False)

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def q(self) -> int:
        return self.spec.q

    def __repr__(self) -> str:
        return f"FieldTable({self.spec}, modulus={self.modulus}, generator={self.generator})"

    def _check(self, x: int) -> None:
        if not 0 <= x < self.q:
            raise FieldError(f"{x} is not an element index of {self.spec}")

    # scalar arithmetic

    def add(self, x: int, y: int) -> int:
        if self.p == 2:
            return x ^ y
        return int(((self.digits[x] + self.digits[y]) % self.p) @ self._place)

    def neg(self, x: int) -> int:
        if self.p == 2:
            return x
        return int(((-self.digits[x]) % self.p) @ self._place)

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return int(self.exp_table[(self.log_table[x] + self.log_table[y]) % (self.q - 1)])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.exp_table[(-self.log_table[x]) % (self.q - 1)])

    def pow(self, x: int, d: int) -> int:
        return pow_element(self, x, d)

    def trace(self, x: int) -> int:
        return trace(self, x)

    def from_prime_field(self, c: int) -> int:
        """Index of the prime-field element ``c mod p``."""
        return c % self.p

    # vectorized arithmetic on index arrays

    def add_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if self.p == 2:
            return x ^ y
        return ((self.digits[x] + self.digits[y]) % self.p) @ self._place

    def neg_vec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if self.p == 2:
            return x
        return ((-self.digits[x]) % self.p) @ self._place

    def sub_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.add_vec(x, self.neg_vec(y))

    def mul_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.broadcast_to(np.asarray(y, dtype=np.int64), x.shape)
        out = np.zeros(x.shape, dtype=np.int64)
        nz = (x != 0) & (y != 0)
        out[nz] = self.exp_table[(self.log_table[x[nz]] + self.log_table[y[nz]]) % (self.q - 1)]
        return out

    def pow_table(self, d: int) -> np.ndarray:
        """The map ``x -> x^d`` on all q elements as an index array."""
        out = np.empty(self.q, dtype=np.int64)
        out[0] = 1 if d == 0 else 0
        k = np.arange(self.q - 1, dtype=np.int64)
        out[self.exp_table] = self.exp_table[(k * (d % (self.q - 1))) % (self.q - 1)]
        return out


def pow_element(f: FieldTable, x: int, d: int) -> int:
    """``x^d`` for ``d >= 0`` via the log table; ``0^0 = 1``."""
    f._check(x)
    if d < 0:
        raise FieldError("negative exponents are not supported")
    if x == 0:
        return 1 if d == 0 else 0
    return int(f.exp_table[(int(f.log_table[x]) * d) % (f.q - 1)])


def trace(f: FieldTable, x: int) -> int:
    """Absolute trace ``Tr(x) in [0, p)`` (table lookup)."""
    f._check(x)
    return int(f.trace_table[x])


def _element_digits(q: int, p: int, n: int) -> np.ndarray:
    idx = np.arange(q, dtype=np.int64)
    cols = []
    for _ in range(n):
        cols.append(idx % p)
        idx = idx // p
    return np.stack(cols, axis=1).astype(np.int64)


def _encode(coeffs: Sequence[int], p: int) -> int:
    v = 0
    for c in reversed(coeffs):
        v = v * p + c
    return v


def _decode(x: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        out.append(x % p)
        x //= p
    return out


def _has_full_order(x: int, modulus: Sequence[int], p: int, n: int, q: int) -> bool:
    poly = _trim(_decode(x, p, n))
    if not poly:
        return False
    if _polypowmod(poly, q - 1, modulus, p) != [1]:
        return False
    for r, _ in factorize(q - 1):
        if _polypowmod(poly, (q - 1) // r, modulus, p) == [1]:
            return False
    return True


def build_field(spec: FieldSpec, modulus: Sequence[int] | None = None,
                q_max: int | None = None) -> FieldTable:
    """Build the tables for ``spec``.

    The defining polynomial is the first monic irreducible one in the order of
    :func:`irreducible_polynomials` unless ``modulus`` is given (used to test
    representation independence).  The generator is the smallest element index
    of multiplicative order ``q - 1``.
    """
    p, n, q = spec.p, spec.n, spec.q
    cap = configured_q_max() if q_max is None else q_max
    if q > cap:
        raise FieldError(f"q = {q} exceeds the table cap {cap}")

    if modulus is None:
        modulus = next(irreducible_polynomials(p, n), None)
        if modulus is None:
            raise FieldDefect(f"no irreducible polynomial found for {spec}")
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != n + 1 or not is_irreducible(modulus, p):
            raise FieldError(f"{modulus} is not a monic irreducible of degree {n} over F_{p}")
    modulus = tuple(modulus)

    if q == 2:
        generator = 1
    else:
        generator = next((x for x in range(2, q) if _has_full_order(x, modulus, p, n, q)), None)
        if generator is None:
            raise FieldDefect(f"no primitive element found for {spec}")

    # multiplication by g is F_p-linear: column i is g * x^i
    g_poly = _decode(generator, p, n)
    cols = []
    for i in range(n):
        img = _polymulmod(g_poly, [0] * i + [1], modulus, p)
        cols.append(img + [0] * (n - len(img)))
    mat = [[cols[c][r] for c in range(n)] for r in range(n)]

    exp_table = np.empty(q - 1, dtype=np.int64)
    log_table = np.full(q, -1, dtype=np.int64)
    y = [1] + [0] * (n - 1)
    for k in range(q - 1):
        code = _encode(y, p)
        if log_table[code] != -1:
            raise FieldDefect(f"generator {generator} has order {k} < q-1 in {spec}")
        exp_table[k] = code
        log_table[code] = k
        y = [sum(row[c] * y[c] for c in range(n)) % p for row in mat]
    if _encode(y, p) != 1:
        raise FieldDefect(f"g^(q-1) != 1 in {spec}")

    digits = _element_digits(q, p, n)

    # Tr(x^i) for the basis, by Frobenius iteration in F_p[x]/(f)
    basis_tr = []
    for i in range(n):
        xi = _polymod([0] * i + [1], modulus, p)
        acc: list[int] = []
        term = xi
        for _ in range(n):
            acc = _polysub(acc, [(-c) % p for c in term], p)
            term = _polypowmod(term, p, modulus, p)
        if len(acc) > 1:
            raise FieldDefect(f"trace of x^{i} is not in the prime field")
        basis_tr.append(acc[0] if acc else 0)
    trace_table = (digits @ np.array(basis_tr, dtype=np.int64)) % p

    table = FieldTable(spec, modulus, generator, exp_table, log_table, trace_table, digits)
    _verify_trace(table)
    return table


def _verify_trace(f: FieldTable) -> None:
    """Recompute Tr(g^k) = sum_j g^(k p^j) through the exp table and field addition."""
    q, p, n = f.q, f.p, f.n
    k = np.arange(q - 1, dtype=np.int64)
    acc = np.zeros(q - 1, dtype=np.int64)
    for j in range(n):
        acc = f.add_vec(acc, f.exp_table[(k * p**j) % (q - 1)])
    expected = f.trace_table[f.exp_table]
    if not np.array_equal(acc, expected) or f.trace_table[0] != 0:
        raise FieldDefect(f"trace table of {f.spec} disagrees with Frobenius iteration")
