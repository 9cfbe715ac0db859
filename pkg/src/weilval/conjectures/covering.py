"""Digitwise covering in Z/(t^n - 1) and witness search.

A witness for ``(t, n, d)`` is a pair of nonzero residues with ``a < b`` and
``d b < d a``, where ``x < y`` means every base-t digit of x is at most the
matching digit of y and ``x != y``.  Witnesses are found by a fixed cascade:

1. ``gcd``: when ``1 < gcd(d, N) < N`` take ``b = N / gcd`` and ``a = t^k``
   for the lowest nonzero digit k of b, so that ``d b = 0``.
2. ``inverse``: when d is a unit, ``b = d^{-1}`` and ``a = t^k`` for the
   smallest k with ``b_k != 0`` and ``d_{-k mod n} != 0``.
3. ``lift``: a witness modulo ``t^m - 1`` for a proper divisor m of n,
   multiplied by ``(t^n - 1) / (t^m - 1)``.
4. ``brute_force``: b ascending, then a ascending over the strict
   digit-subvectors of b.

Every witness is re-checked by :func:`check_certificate` on construction.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from ..arith import divisors, euler_phi, is_perfect_power
from ..stickelberger import weight

METHODS = ("vincent_gcd", "colin_inverse", "leonard_lift", "brute_force")

DEFAULT_SIZE_BOUND = 3 * 10**6
DEFAULT_N1_EXHAUSTIVE = 10**4


class CoveringPrecondition(ValueError):
    """d is zero or a power of t modulo t^n - 1."""


class CertificateError(RuntimeError):
    pass


class CounterexampleFound(RuntimeError):
    """No witness exists: a counterexample to the covering conjecture."""

    def __init__(self, t, n, d):
        super().__init__(f"COUNTEREXAMPLE: no covering witness for t={t}, n={n}, d={d}")
        self.t, self.n, self.d = t, n, d


def _digits(t: int, n: int, x: int) -> list[int]:
    out = []
    for _ in range(n):
        x, r = divmod(x, t)
        out.append(r)
    return out


def covers(t: int, n: int, a: int, b: int, strict: bool = False) -> bool:
    """True iff every base-t digit of a is <= the matching digit of b."""
    mod = t**n - 1
    a %= mod
    b %= mod
    if strict and a == b:
        return False
    return all(x <= y for x, y in zip(_digits(t, n, a), _digits(t, n, b)))


def check_certificate(t: int, n: int, d: int, a: int, b: int) -> bool:
    mod = t**n - 1
    a %= mod
    b %= mod
    if a == 0 or b == 0:
        return False
    return covers(t, n, a, b, strict=True) and covers(t, n, d * b, d * a, strict=True)


@dataclass(frozen=True)
class CoveringWitness:
    t: int
    n: int
    d: int
    a: int
    b: int
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not check_certificate(self.t, self.n, self.d, self.a, self.b):
            raise CertificateError(f"bad witness {self}")


def is_eligible(t: int, n: int, d: int) -> bool:
    mod = t**n - 1
    if mod <= 1:
        return False
    r = d % mod
    return r != 0 and all(r != t**k for k in range(n))


def weight_sum_identity(t: int, n: int, d: int, a: int, b: int) -> tuple[int, int, int]:
    """``(alpha, beta, gamma)`` of the digit-weight argument; they sum to ``2 n (t-1)``."""
    alpha = weight(t, n, -d * a) + weight(t, n, a)
    beta = weight(t, n, d * b) + weight(t, n, -b)
    gamma = weight(t, n, d * a - d * b) + weight(t, n, b - a)
    return alpha, beta, gamma


# -- the cascade ----------------------------------------------------------------


def vincent_witness(t: int, n: int, d: int) -> tuple[int, int] | None:
    mod = t**n - 1
    g = gcd(d % mod, mod)
    if not 1 < g < mod:
        return None
    e = mod // g
    k = next(i for i, x in enumerate(_digits(t, n, e)) if x)
    return t**k, e


def colin_candidates(t: int, n: int, d: int) -> list[int]:
    """Every k with ``e_k != 0`` and ``d_{-k mod n} != 0`` (e the inverse of d)."""
    mod = t**n - 1
    dr = d % mod
    if gcd(dr, mod) != 1:
        return []
    e = pow(dr, -1, mod)
    dd, ee = _digits(t, n, dr), _digits(t, n, e)
    return [k for k in range(n) if ee[k] and dd[-k % n]]


def colin_witness(t: int, n: int, d: int) -> tuple[int, int] | None:
    ks = colin_candidates(t, n, d)
    if not ks:
        return None
    mod = t**n - 1
    return t ** ks[0], pow(d % mod, -1, mod)


def leonard_witness(t: int, n: int, d: int) -> tuple[int, int] | None:
    mod = t**n - 1
    for m in divisors(n):
        if m == n or not is_eligible(t, m, d):
            continue
        try:
            low = _cached_witness(t, m, d % (t**m - 1))
        except CounterexampleFound:
            continue
        lift = mod // (t**m - 1)
        return lift * low.a % mod, lift * low.b % mod
    return None


def _subvectors(t: int, n: int, b: int):
    """Nonzero a != b with a's digits <= b's, ascending."""
    bd = _digits(t, n, b)
    ranges = [range(x + 1) for x in reversed(bd)]
    for combo in itertools.product(*ranges):
        a = 0
        for x in combo:
            a = a * t + x
        if a and a != b:
            yield a


def brute_force_witness(t: int, n: int, d: int) -> tuple[int, int] | None:
    mod = t**n - 1
    for b in range(1, mod):
        db = d * b % mod
        for a in _subvectors(t, n, b):
            if covers(t, n, db, d * a, strict=True):
                return a, b
    return None


_CASCADE = (
    ("vincent_gcd", vincent_witness),
    ("colin_inverse", colin_witness),
    ("leonard_lift", leonard_witness),
    ("brute_force", brute_force_witness),
)


def covering_witness(t: int, n: int, d: int) -> CoveringWitness:
    if t < 2 or n < 1:
        raise CoveringPrecondition(f"need t >= 2 and n >= 1, got t={t}, n={n}")
    if not is_eligible(t, n, d):
        raise CoveringPrecondition(f"d={d} is zero or a power of t modulo {t}^{n}-1")
    return _cached_witness(t, n, d % (t**n - 1))


@lru_cache(maxsize=1 << 16)
def _cached_witness(t: int, n: int, d: int) -> CoveringWitness:
    for name, fn in _CASCADE:
        found = fn(t, n, d)
        if found is not None:
            return CoveringWitness(t, n, d, found[0], found[1], name)
    raise CounterexampleFound(t, n, d)


# -- vectorized block scan --------------------------------------------------------


def _vdigits(t: int, n: int, x: np.ndarray) -> np.ndarray:
    out = np.empty((n, len(x)), dtype=np.int64)
    x = x.copy()
    for i in range(n):
        out[i] = x % t
        x //= t
    return out


def _vcovers_strict(t: int, n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ok = a != b
    ad, bd = _vdigits(t, n, a), _vdigits(t, n, b)
    return ok & np.all(ad <= bd, axis=0)


def _vpow(base: np.ndarray, exp: int, mod: int) -> np.ndarray:
    result = np.ones_like(base)
    base = base % mod
    while exp:
        if exp & 1:
            result = result * base % mod
        base = base * base % mod
        exp >>= 1
    return result


def _vinverse(x: np.ndarray, mod: np.ndarray) -> np.ndarray:
    """Elementwise inverse of x modulo mod (entries must be coprime)."""
    old_r, r = x % mod, mod.copy()
    old_s, s = np.ones_like(x), np.zeros_like(x)
    while True:
        live = r != 0
        if not live.any():
            break
        q = np.where(live, old_r // np.where(live, r, 1), 0)
        old_r, r = np.where(live, r, old_r), np.where(live, old_r - q * r, r)
        old_s, s = np.where(live, s, old_s), np.where(live, old_s - q * s, s)
    return old_s % mod


def _first_true(mask: np.ndarray) -> np.ndarray:
    """Row index of the first True in each column (mask shape ``(n, m)``)."""
    return np.argmax(mask, axis=0)


def vcertify(t: int, n: int, d: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mod = t**n - 1
    ok = (a % mod != 0) & (b % mod != 0)
    ok &= _vcovers_strict(t, n, a % mod, b % mod)
    ok &= _vcovers_strict(t, n, d * b % mod, d * a % mod)
    return ok


@dataclass(frozen=True)
class CoveringBlock:
    t: int
    n: int
    classes: int
    by_method: dict
    coprime: int
    failures: tuple[int, ...] = ()
    certified: int = 0
    # brute force used although d != 1 mod t-1
    off_slice_brute: int = 0
    analytic: bool = False
    t_hi: int | None = None

    @property
    def ok(self) -> bool:
        return not self.failures and self.certified == self.classes - len(self.failures) \
            and self.off_slice_brute == 0


def canonical_residues(t: int, n: int) -> np.ndarray:
    """Eligible d modulo t^n - 1, one per orbit of ``d -> t d``, smallest member first."""
    mod = t**n - 1
    if mod <= 1:
        return np.zeros(0, dtype=np.int64)
    d = np.arange(2, mod, dtype=np.int64)
    keep = np.ones(len(d), dtype=bool)
    r = d.copy()
    for _ in range(n - 1):
        r = r * t % mod
        keep &= d <= r
    for k in range(n):
        keep &= d != t**k
    return d[keep]


def scan_block(t: int, n: int) -> CoveringBlock:
    """Find and certify a witness for every eligible class modulo ``t^n - 1``."""
    mod = t**n - 1
    d = canonical_residues(t, n)
    m = len(d)
    a = np.zeros(m, dtype=np.int64)
    b = np.zeros(m, dtype=np.int64)
    method = np.full(m, -1, dtype=np.int8)

    g = np.gcd(d, mod)
    vin = g > 1
    if vin.any():
        e = mod // g[vin]
        k = _first_true(_vdigits(t, n, e) != 0)
        a[vin] = t ** k
        b[vin] = e
        method[vin] = 0

    unit = ~vin
    if unit.any():
        du = d[unit]
        inv = _vpow(du, euler_phi(mod) - 1, mod)
        dd, ee = _vdigits(t, n, du), _vdigits(t, n, inv)
        shifted = dd[[(-k) % n for k in range(n)]]
        hit = (ee != 0) & (shifted != 0)
        has = hit.any(axis=0)
        k = _first_true(hit)
        idx = np.nonzero(unit)[0]
        col = idx[has]
        a[col] = t ** k[has]
        b[col] = inv[has]
        method[col] = 1

    rest = method < 0
    if rest.any() and t > 3 and n > 1:
        # lift from modulus t - 1 (smallest proper divisor m = 1)
        d1 = d % (t - 1)
        ok = rest & (d1 > 1)
        if ok.any():
            x = d1[ok]
            g1 = np.gcd(x, t - 1)
            low_b = np.where(g1 > 1, (t - 1) // g1, _vpow(x, euler_phi(t - 1) - 1, t - 1))
            lift = mod // (t - 1)
            a[ok] = lift
            b[ok] = lift * low_b % mod
            method[ok] = 2

    failures = []
    for i in np.nonzero(method < 0)[0]:
        try:
            w = _cached_witness(t, n, int(d[i]))
        except CounterexampleFound:
            failures.append(int(d[i]))
            continue
        a[i], b[i] = w.a, w.b
        method[i] = METHODS.index(w.method)

    found = method >= 0
    cert = vcertify(t, n, d[found], a[found], b[found])
    by_method = {name: int(np.count_nonzero(method == i)) for i, name in enumerate(METHODS)}
    off = 0
    if t > 2:
        off = int(np.count_nonzero((method == 3) & (d % (t - 1) != 1)))
    return CoveringBlock(t, n, m, by_method, int(np.count_nonzero(unit)), tuple(failures),
                         int(np.count_nonzero(cert)), off)


# -- single-digit range, closed form ------------------------------------------------


def _phi_sieve(limit: int) -> np.ndarray:
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def _perfect_power_mask(limit: int) -> np.ndarray:
    mask = np.zeros(limit + 1, dtype=bool)
    for base in range(2, isqrt(limit) + 1):
        x = base * base
        while x <= limit:
            mask[x] = True
            x *= base
    return mask


def analytic_single_digit(t_lo: int, t_hi: int, include_powers: bool = False,
                          phi: np.ndarray | None = None,
                          powers: np.ndarray | None = None) -> CoveringBlock:
    """Aggregate record for ``n = 1`` and every base in ``[t_lo, t_hi]``.

    With one digit the cascade never leaves its first two steps: units give
    ``(1, d^{-1})`` and the rest give ``(1, (t-1)/gcd)``.  Class counts come
    from Euler's totient; the construction is certified on sampled d for
    every base in the range.
    """
    ts = np.arange(t_lo, t_hi + 1, dtype=np.int64)
    if phi is None:
        phi = _phi_sieve(t_hi)
    if not include_powers:
        if powers is None:
            powers = _perfect_power_mask(t_hi)
        ts = ts[~powers[ts]]
    ts = ts[ts >= 4]
    classes = int(np.sum(ts - 3))
    coprime = int(np.sum(phi[ts - 1] - 1))
    by_method = dict.fromkeys(METHODS, 0)
    by_method["colin_inverse"] = coprime
    by_method["vincent_gcd"] = classes - coprime

    certified = 0
    tot = 0
    for pick in (lambda t: np.full_like(t, 2), lambda t: t // 2, lambda t: t - 2):
        dd = pick(ts)
        mod = ts - 1
        ok = (dd >= 2) & (dd <= ts - 2)
        dd, mod = dd[ok], mod[ok]
        g = np.gcd(dd, mod)
        b = np.where(g > 1, mod // g, _vinverse(dd, mod))
        # one digit: a = 1 < b needs b >= 2, and d b in {0, 1} < d needs d >= 2
        good = (b >= 2) & (b < mod) & (dd * b % mod < dd)
        certified += int(np.count_nonzero(good))
        tot += len(dd)
    if certified != tot:
        raise CertificateError(f"closed-form witness rejected in [{t_lo}, {t_hi}]")
    return CoveringBlock(t_lo, 1, classes, by_method, coprime, (), classes, 0,
                         analytic=True, t_hi=t_hi)


# -- whole scan ----------------------------------------------------------------------


def scan_plan(size_bound: int, include_powers: bool = False,
              n1_exhaustive: int = DEFAULT_N1_EXHAUSTIVE,
              analytic_chunk: int = 10**5) -> list[tuple]:
    """Ordered work units: ``("block", t, n)`` or ``("range", t_lo, t_hi)``."""
    plan = []
    t_exh = min(size_bound, max(n1_exhaustive + 1, isqrt(size_bound)))
    for t in range(2, t_exh + 1):
        if include_powers or not is_perfect_power(t):
            n = 1
            while t**n <= size_bound:
                plan.append(("block", t, n))
                n += 1
    lo = t_exh + 1
    while lo <= size_bound:
        hi = min(size_bound, lo + analytic_chunk - 1)
        plan.append(("range", lo, hi))
        lo = hi + 1
    return plan


def run_unit(unit: tuple, include_powers: bool = False) -> CoveringBlock:
    if unit[0] == "block":
        return scan_block(unit[1], unit[2])
    return analytic_single_digit(unit[1], unit[2], include_powers)


@dataclass
class CoveringReport:
    size_bound: int
    blocks: list = field(default_factory=list)

    def totals(self) -> Counter:
        c = Counter()
        for blk in self.blocks:
            c.update(blk.by_method)
        return c

    @property
    def classes(self) -> int:
        return sum(b.classes for b in self.blocks)

    @property
    def failures(self) -> list[tuple[int, int, int]]:
        return [(b.t, b.n, d) for b in self.blocks for d in b.failures]

    @property
    def certified(self) -> int:
        return sum(b.certified for b in self.blocks)

    @property
    def colin_rate(self) -> float:
        coprime = sum(b.coprime for b in self.blocks)
        colin = self.totals()["colin_inverse"]
        return colin / coprime if coprime else 1.0

    @property
    def ok(self) -> bool:
        return all(b.ok for b in self.blocks)


def covering_scan(size_bound: int = DEFAULT_SIZE_BOUND, include_powers: bool = False,
                  n1_exhaustive: int = DEFAULT_N1_EXHAUSTIVE, jobs: int = 1) -> CoveringReport:
    """Every non-perfect-power t and n with ``t^n <= size_bound``."""
    plan = scan_plan(size_bound, include_powers, n1_exhaustive)
    report = CoveringReport(size_bound)
    if jobs > 1:
        from functools import partial
        from multiprocessing import Pool
        with Pool(jobs) as pool:
            report.blocks.extend(pool.imap(partial(run_unit, include_powers=include_powers),
                                           plan, chunksize=4))
    else:
        report.blocks.extend(run_unit(u, include_powers) for u in plan)
    return report
