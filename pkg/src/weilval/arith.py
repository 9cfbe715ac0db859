"""Small integer number-theory helpers shared across the package."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (inputs here are small)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n >= 1`` as ``((prime, exponent), ...)``."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    for f in (2, 3):
        e = 0
        while n % f == 0:
            n //= f
            e += 1
        if e:
            out.append((f, e))
    f = 5
    while f * f <= n:
        for g in (f, f + 2):
            e = 0
            while n % g == 0:
                n //= g
                e += 1
            if e:
                out.append((g, e))
        f += 6
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_divisors(n: int) -> list[int]:
    return [f for f, _ in factorize(n)]


def divisors(n: int) -> list[int]:
    divs = [1]
    for f, e in factorize(n):
        divs = [d * f**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def least_odd_prime_divisor(n: int) -> int | None:
    for f in prime_divisors(n):
        if f != 2:
            return f
    return None


def prime_power_decomposition(q: int) -> tuple[int, int] | None:
    """Return ``(p, n)`` with ``q == p**n`` or None if q is not a prime power."""
    if q < 2:
        return None
    fac = factorize(q)
    if len(fac) != 1:
        return None
    return fac[0]


def prime_powers(lo: int, hi: int) -> list[tuple[int, int]]:
    """All ``(p, n)`` with ``lo <= p**n <= hi``, sorted by ``(p, n)``."""
    out = []
    for p in range(2, hi + 1):
        if not is_prime(p):
            continue
        q, n = p, 1
        while q <= hi:
            if q >= lo:
                out.append((p, n))
            q *= p
            n += 1
    return out


def is_perfect_power(t: int) -> bool:
    """True when ``t = s**k`` for some integers s >= 2, k >= 2."""
    if t < 4:
        return False
    for k in range(2, t.bit_length() + 1):
        s = round(t ** (1.0 / k))
        for c in (s - 1, s, s + 1):
            if c >= 2 and c**k == t:
                return True
    return False


def mod_inverse(a: int, m: int) -> int:
    return pow(a, -1, m)


def multiplicative_order(a: int, m: int) -> int:
    """Order of ``a`` in (Z/mZ)^x; requires gcd(a, m) == 1."""
    if m == 1:
        return 1
    if gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit modulo {m}")
    phi = euler_phi(m)
    order = phi
    for f, _ in factorize(phi):
        while order % f == 0 and pow(a, order // f, m) == 1:
            order //= f
    return order


def euler_phi(n: int) -> int:
    r = n
    for f, _ in factorize(n):
        r -= r // f
    return r


def integer_sqrt_exact(n: int) -> int | None:
    r = isqrt(n)
    return r if r * r == n else None


def p_adic_valuation(x: int, p: int) -> int:
    """Ordinary p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    x = abs(x)
    while x % p == 0:
        x //= p
        v += 1
    return v
