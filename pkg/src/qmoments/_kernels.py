"""Numba-compiled inner loops.

Everything here mirrors a pure-Python definition elsewhere in the package and
exists only for speed: the scalar Kronecker symbol, per-discriminant character
tables built through complete multiplicativity, batched theta evaluation with
certified truncation, and the float-weighted square-pair count used by the
leading-coefficient fit.  ``cache=True`` keeps compilation cost to the first
run.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def kron_i64(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for int64 inputs; same algorithm as arith.kronecker."""
    if n == 0:
        if a == 1 or a == -1:
            return 1
        return 0
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1:
            r = a % 8
            if r < 0:
                r += 8
            if r == 3 or r == 5:
                k = -k
    a %= n
    if a < 0:
        a += n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r = n % 8
            if r == 3 or r == 5:
                k = -k
        t = a
        a = n
        n = t
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    if n == 1:
        return k
    return 0


@njit(cache=True)
def chi_table(d: int, nmax: int, spf: np.ndarray) -> np.ndarray:
    """chi_d(n) = (d|n) for 0 <= n <= nmax, filled via complete multiplicativity."""
    chi = np.zeros(nmax + 1, dtype=np.int8)
    if nmax >= 1:
        chi[1] = 1
    for n in range(2, nmax + 1):
        p = spf[n]
        if p == n:
            chi[n] = kron_i64(d, n)
        else:
            chi[n] = chi[p] * chi[n // p]
    return chi


@njit(cache=True)
def max_abs_prefix(values: np.ndarray) -> int:
    """max over Y of |sum_{n<=Y} values[n]| for a 0-indexed table with values[0]=0."""
    s = 0
    best = 0
    for n in range(1, values.size):
        s += values[n]
        a = -s if s < 0 else s
        if a > best:
            best = a
    return best


@njit(cache=True)
def theta_batch(ds: np.ndarray, t: float, spf: np.ndarray, tol_coeff: float):
    """theta(t, chi_d) for every d in ds, truncated with a certified tail bound.

    For each d the cutoff N is the smallest length whose geometric-majorant
    tail bound exp(-pi N^2 t / d) / (1 - exp(-pi (2N+1) t / d)) drops below
    tol_coeff * max(1, sqrt(d/t)).  Terms are summed in ascending n, so a
    longer truncation shares the exact same floating prefix.

    Returns (values, tail_bounds, lengths, ok); ok is False when the supplied
    spf table was too short for some cutoff.
    """
    m = ds.size
    vals = np.empty(m, dtype=np.float64)
    tails = np.empty(m, dtype=np.float64)
    lengths = np.empty(m, dtype=np.int64)
    navail = spf.size - 1
    ok = True
    for j in range(m):
        d = ds[j]
        dd = float(d)
        tol = tol_coeff * max(1.0, math.sqrt(dd / t))
        c = math.pi * t / dd
        # Start slightly below the analytic cutoff and step up to certainty.
        n0 = int(math.sqrt(max(dd / t, 1.0) * 10.0))
        N = n0 if n0 >= 1 else 1
        while True:
            tail = math.exp(-c * N * N) / -math.expm1(-c * (2 * N + 1))
            if tail <= tol:
                break
            N += 1
        if N > navail:
            ok = False
            N = navail
            tail = math.exp(-c * N * N) / -math.expm1(-c * (2 * N + 1))
        chi = np.zeros(N + 1, dtype=np.int8)
        if N >= 1:
            chi[1] = 1
        s = math.exp(-c)
        for n in range(2, N + 1):
            p = spf[n]
            if p == n:
                chi[n] = kron_i64(d, n)
            else:
                chi[n] = chi[p] * chi[n // p]
            if chi[n] == 1:
                s += math.exp(-c * n * n)
            elif chi[n] == -1:
                s -= math.exp(-c * n * n)
        vals[j] = s
        tails[j] = tail
        lengths[j] = N
    return vals, tails, lengths, ok


@njit(cache=True)
def _isqrt_i64(x: int) -> int:
    if x < 0:
        return 0
    r = int(math.sqrt(float(x)))
    while (r + 1) * (r + 1) <= x:
        r += 1
    while r * r > x:
        r -= 1
    return r


@njit(cache=True)
def radical_weight_table(nmax: int, spf: np.ndarray) -> np.ndarray:
    """w[n] = prod_{p|n} p/(p+1) as float64 for 0 <= n <= nmax."""
    w = np.ones(nmax + 1, dtype=np.float64)
    w[0] = 1.0
    for n in range(2, nmax + 1):
        p = spf[n]
        m = n // p
        if m % p == 0:
            w[n] = w[m]
        else:
            w[n] = w[m] * p / (p + 1.0)
    return w


@njit(cache=True)
def square_pair_weighted_sum(b1: int, b2: int, spf: np.ndarray, w: np.ndarray):
    """Float sum of prod_{p | n1*n2} p/(p+1) over n1 <= b1, n2 <= b2 with n1*n2 square.

    A product of two integers is a square exactly when they share the same
    squarefree kernel a, so the sum runs over a squarefree and the cofactors
    n_i = a * c_i^2.  The weight is assembled from the union of prime
    supports: primes of a, then new primes of c1, then new primes of c2.
    """
    total = 0.0
    count = 0
    bmin = b1 if b1 < b2 else b2
    for a in range(1, bmin + 1):
        # skip non-squarefree a
        m = a
        sf = True
        while m > 1:
            p = spf[m]
            m //= p
            if m % p == 0:
                sf = False
                break
        if not sf:
            continue
        wa = w[a]
        m1 = _isqrt_i64(b1 // a)
        m2 = _isqrt_i64(b2 // a)
        for c1 in range(1, m1 + 1):
            w1 = wa
            m = c1
            while m > 1:
                p = spf[m]
                if a % p != 0:
                    w1 *= p / (p + 1.0)
                while m % p == 0:
                    m //= p
            for c2 in range(1, m2 + 1):
                wgt = w1
                m = c2
                while m > 1:
                    p = spf[m]
                    if a % p != 0 and c1 % p != 0:
                        wgt *= p / (p + 1.0)
                    while m % p == 0:
                        m //= p
                total += wgt
                count += 1
    return total, count
