"""Exact elementary number theory over positive fundamental discriminants.

A positive integer d > 1 is a fundamental discriminant when either

* d ≡ 1 (mod 4) and d is squarefree, or
* d = 4m with m squarefree and m ≡ 2 or 3 (mod 4).

Each such d carries the primitive real character chi_d(n) = (d|n), the
Kronecker symbol with d on top.  This module provides the symbol itself
(reciprocity reduction, no factorisation), the segmented squarefree sieve
that enumerates the family up to a bound, the multiplicative weights
prod_{p|n} p/(p+1), and exact character sums taken over the whole family.

The trivial discriminant d = 1 is excluded by default; ``include_unit=True``
re-includes it where that makes sense.  All enumeration paths refuse inputs
beyond the 62-bit guard instead of wrapping silently.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import ValidationError, resolve_threads

# int64 head-room for d and 4*d intermediates; larger inputs are refused.
MAX_SUPPORTED = 1 << 62
DEFAULT_SEGMENT = 1 << 20

CACHE_MAGIC = b"QFD1"


class DiscriminantKind(Enum):
    ONE_MOD_FOUR_SQUAREFREE = "1mod4"
    FOUR_TIMES_M = "4m"


@dataclass(frozen=True)
class Discriminant:
    """A positive fundamental discriminant and its congruence class."""

    d: int
    kind: DiscriminantKind

    def __int__(self) -> int:
        return self.d


def _as_int(d) -> int:
    return d.d if isinstance(d, Discriminant) else int(d)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), computed by reciprocity without factoring.

    Total on all integer pairs; completely multiplicative in n, and for a
    fundamental discriminant a > 0 it is the primitive real character mod a.
    Runs in O(log^2) bit operations.
    """
    a = int(a)
    n = int(n)
    if n == 0:
        return 1 if a in (1, -1) else 0
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -1
    # Split off the even part of n; (a|2) depends on a mod 8.
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            k = -k
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def _is_squarefree(n: int) -> bool:
    if n % 4 == 0:
        return False
    if n % 2 == 0:
        n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
        p += 2
    return True


def is_fundamental(d: int, include_unit: bool = False) -> bool:
    """True when d indexes a primitive real character (positive d only)."""
    d = _as_int(d)
    if d < 1:
        return False
    if d == 1:
        return include_unit
    r = d % 4
    if r == 1:
        return _is_squarefree(d)
    if r == 0:
        m = d // 4
        return m % 4 in (2, 3) and _is_squarefree(m)
    return False


def classify(d: int) -> Discriminant:
    d = _as_int(d)
    if not is_fundamental(d, include_unit=True):
        raise ValidationError(f"{d} is not a positive fundamental discriminant")
    kind = (
        DiscriminantKind.ONE_MOD_FOUR_SQUAREFREE
        if d % 4 == 1
        else DiscriminantKind.FOUR_TIMES_M
    )
    return Discriminant(d, kind)


# ---------------------------------------------------------------------------
# Prime sieves (shared plumbing for every module).
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def primes_up_to(n: int) -> np.ndarray:
    """Ascending primes <= n as an int64 array (classic boolean sieve)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    out = np.nonzero(flags)[0].astype(np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=4)
def smallest_prime_factor(n: int) -> np.ndarray:
    """spf[m] = least prime factor of m for 2 <= m <= n (spf[0]=spf[1]=1)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    spf[:2] = 1
    for p in range(2, isqrt(n) + 1):
        if spf[p] == 0:
            view = spf[p::p]
            view[view == 0] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest
    spf.setflags(write=False)
    return spf


# ---------------------------------------------------------------------------
# Segmented enumeration of the discriminant family.
# ---------------------------------------------------------------------------

def _squarefree_flags(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    flags = np.ones(hi - lo + 1, dtype=bool)
    for p in primes:
        q = int(p) * int(p)
        if q > hi:
            break
        start = ((lo + q - 1) // q) * q
        if start <= hi:
            flags[start - lo :: q] = False
    return flags


def _segment_values(lo: int, hi: int, primes: np.ndarray, include_unit: bool) -> np.ndarray:
    """Fundamental discriminants in [lo, hi], ascending."""
    idx = np.arange(lo, hi + 1, dtype=np.int64)
    sf = _squarefree_flags(lo, hi, primes)
    floor = 0 if include_unit else 1
    d_odd = idx[((idx & 3) == 1) & sf & (idx > floor)]
    mlo = max((lo + 3) // 4, 1)
    mhi = hi // 4
    if mhi >= mlo:
        m = np.arange(mlo, mhi + 1, dtype=np.int64)
        sfm = _squarefree_flags(mlo, mhi, primes)
        rem = m & 3
        d_even = 4 * m[sfm & ((rem == 2) | (rem == 3))]
    else:
        d_even = np.empty(0, dtype=np.int64)
    out = np.concatenate([d_odd, d_even])
    out.sort()
    return out


def _check_bound(X: int) -> int:
    X = int(X)
    if X > MAX_SUPPORTED:
        raise ValidationError(
            f"bound {X} exceeds the supported 62-bit range; refusing rather than overflow"
        )
    return X


def enumerate_fundamental(
    X: int,
    segment_size: int = DEFAULT_SEGMENT,
    include_unit: bool = False,
) -> Iterator[Discriminant]:
    """Yield every fundamental discriminant d <= X in ascending order.

    The sieve works on segments of ``segment_size`` integers so memory stays
    O(segment + sqrt(X)); the output stream is identical for every segment
    size.
    """
    X = _check_bound(X)
    if segment_size < 1:
        raise ValidationError("segment_size must be >= 1")
    if X < 1:
        return
    primes = primes_up_to(isqrt(X))
    for lo in range(1, X + 1, segment_size):
        hi = min(lo + segment_size - 1, X)
        for d in _segment_values(lo, hi, primes, include_unit):
            d = int(d)
            kind = (
                DiscriminantKind.ONE_MOD_FOUR_SQUAREFREE
                if d % 4 == 1
                else DiscriminantKind.FOUR_TIMES_M
            )
            yield Discriminant(d, kind)


@lru_cache(maxsize=6)
def fundamental_discriminants(X: int, include_unit: bool = False) -> np.ndarray:
    """All fundamental d <= X as an ascending read-only int64 array."""
    X = _check_bound(X)
    if X < 1:
        return np.empty(0, dtype=np.int64)
    primes = primes_up_to(isqrt(X))
    parts = []
    for lo in range(1, X + 1, DEFAULT_SEGMENT):
        hi = min(lo + DEFAULT_SEGMENT - 1, X)
        parts.append(_segment_values(lo, hi, primes, include_unit))
    out = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    out.setflags(write=False)
    return out


def fundamental_count(X: int) -> int:
    return int(fundamental_discriminants(X).size)


# ---------------------------------------------------------------------------
# Multiplicative weights and family character sums.
# ---------------------------------------------------------------------------

def radical_weight(n: int) -> Fraction:
    """Exact product of p/(p+1) over the distinct primes p dividing n."""
    n = int(n)
    if n < 1:
        raise ValidationError("radical_weight requires n >= 1")
    w = Fraction(1)
    if n % 2 == 0:
        w *= Fraction(2, 3)
        while n % 2 == 0:
            n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            w *= Fraction(p, p + 1)
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        w *= Fraction(n, n + 1)
    return w


@lru_cache(maxsize=512)
def top_residue_table(n: int) -> np.ndarray:
    """(r|n) for r = 0..4n-1; 4n is always a period of the top argument."""
    n = int(n)
    if n < 1:
        raise ValidationError("top_residue_table requires n >= 1")
    table = np.empty(4 * n, dtype=np.int8)
    for r in range(4 * n):
        table[r] = kronecker(r, n)
    table.setflags(write=False)
    return table


def char_sum_over_discriminants(
    n: int,
    X: int,
    threads: int | None = None,
    segment: int = DEFAULT_SEGMENT,
) -> int:
    """Exact integer sum of chi_d(n) over all fundamental d <= X.

    Evaluated through the residue table of (.|n) modulo 4n, so the cost is
    one vectorised pass over the family regardless of n.  Partial sums over
    fixed segments are merged by integer addition, which makes the result
    independent of the worker count.
    """
    n = int(n)
    X = _check_bound(X)
    if n < 1:
        raise ValidationError("char_sum_over_discriminants requires n >= 1")
    if X < 2:
        raise ValidationError("char_sum_over_discriminants requires X >= 2")
    ds = fundamental_discriminants(X)
    if ds.size == 0:
        return 0
    table = top_residue_table(n)
    mod = 4 * n
    spans = [(lo, min(lo + segment, ds.size)) for lo in range(0, ds.size, segment)]

    def part(span):
        lo, hi = span
        return int(np.sum(table[ds[lo:hi] % mod], dtype=np.int64))

    workers = resolve_threads(threads)
    if workers == 1 or len(spans) == 1:
        return sum(part(s) for s in spans)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(part, spans))


# ---------------------------------------------------------------------------
# Discriminant cache file: "QFD1", u64 little-endian count, then the values.
# ---------------------------------------------------------------------------

def write_discriminant_cache(path: str | Path, values: np.ndarray) -> None:
    values = np.ascontiguousarray(values, dtype=np.int64)
    if values.size and np.any(np.diff(values) <= 0):
        raise ValidationError("cache values must be strictly ascending")
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<Q", values.size))
        fh.write(values.astype("<u8").tobytes())


def read_discriminant_cache(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CACHE_MAGIC:
            raise ValidationError(f"bad cache magic {magic!r}")
        (count,) = struct.unpack("<Q", fh.read(8))
        raw = fh.read(8 * count)
    if len(raw) != 8 * count:
        raise ValidationError("truncated discriminant cache")
    values = np.frombuffer(raw, dtype="<u8").astype(np.int64)
    if values.size and np.any(np.diff(values) <= 0):
        raise ValidationError("cache values not ascending")
    return values
