"""Exact weighted counts of k-tuples whose product is a perfect square.

The central quantity is

    T_k(B_1, ..., B_k) = sum over n_i <= B_i with n_1 n_2 ... n_k a square
                         of prod_{p | n_1...n_k} p/(p+1),

an exact rational.  Two independent implementations are provided:

* ``count_oracle`` enumerates the whole box and tests each product with an
  integer square root.  Dumb, slow, and trusted.
* ``count_fast`` walks the coordinates while tracking the squarefree kernel
  of the running product.  A product is a square exactly when the kernels
  cancel, so the last coordinate only ranges over K * c^2 for the kernel K
  left over from the first k-1 coordinates.  The weight over the union of
  prime supports is maintained incrementally, and branches whose kernel can
  no longer be absorbed by the remaining coordinates are pruned.

T_k(Y, ..., Y) grows like Y^{k/2} times a polynomial in log Y of degree
k(k-1)/2; ``fit_leading`` recovers that polynomial by least squares on a grid
of Y values.  For k = 2 the grid evaluation uses a float mirror of the kernel
decomposition (exact rationals over millions of terms would reduce to
fractions with tens of thousands of digits), cross-checked against the exact
routines on small boxes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from . import _kernels
from .arith import primes_up_to, radical_weight, smallest_prime_factor
from .errors import NumericFailure, ValidationError, check_budget, resolve_threads

ORACLE_MAX_PRODUCT = 10 ** 10
FAST_MAX_BOUND = 10 ** 6
FAST_MAX_K = 6
ORACLE_MAX_K = 5
# count_fast cost metric: enumerated partial tuples times a rational-size
# proxy (number of primes up to the largest bound); exact-arithmetic cost
# grows with the accumulated denominator, so the default is deliberately low.
FAST_DEFAULT_BUDGET = 10 ** 8


@dataclass(frozen=True)
class SquareCountResult:
    k: int
    bounds: tuple[int, ...]
    value: Fraction
    tuple_count: int

    def csv_row(self) -> str:
        b = ";".join(str(x) for x in self.bounds)
        v = f"{self.value.numerator}/{self.value.denominator}"
        return f"{self.k},{b},{v},{self.tuple_count}"


@dataclass(frozen=True)
class FitResult:
    k: int
    degree: int
    coefficients: tuple[float, ...]
    leading: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "degree": self.degree,
            "coefficients": list(self.coefficients),
            "leading": self.leading,
            "residual": self.residual,
        }


def _check_bounds(k: int, bounds, max_k: int, max_bound: int | None = None):
    k = int(k)
    bounds = tuple(int(b) for b in bounds)
    if len(bounds) != k:
        raise ValidationError(f"expected {k} bounds, got {len(bounds)}")
    if k < 1 or k > max_k:
        raise ValidationError(f"k must lie in [1, {max_k}]")
    if any(b < 1 for b in bounds):
        raise ValidationError("bounds must be positive")
    if max_bound is not None and max(bounds) > max_bound:
        raise ValidationError(f"bounds must not exceed {max_bound}")
    return k, bounds


def count_oracle(k: int, bounds, budget: int | None = None) -> SquareCountResult:
    """Brute-force reference: enumerate every tuple in the box.

    Exact but O(prod bounds); refuse anything beyond the stated product cap.
    """
    k, bounds = _check_bounds(k, bounds, ORACLE_MAX_K)
    cost = math.prod(bounds)
    if cost > ORACLE_MAX_PRODUCT:
        raise ValidationError(
            f"product of bounds {cost:.3g} exceeds the brute-force cap {ORACLE_MAX_PRODUCT:.0e}"
        )
    check_budget(cost, budget, "count_oracle")
    total = Fraction(0)
    count = 0

    def rec(i: int, prod: int) -> None:
        nonlocal total, count
        if i == k:
            r = isqrt(prod)
            if r * r == prod:
                total += radical_weight(prod)
                count += 1
            return
        for n in range(1, bounds[i] + 1):
            rec(i + 1, prod * n)

    rec(0, 1)
    return SquareCountResult(k, bounds, total, count)


def oracle_prefix_table(k: int, bounds, budget: int | None = None) -> np.ndarray:
    """T_k for every prefix box at once, from one sweep of the full box.

    Entry [b1-1, ..., bk-1] of the returned object array holds the exact
    rational T_k(b1, ..., bk).  Each tuple of the definition is visited once
    and its weight added to the cumulative table, so this is still the
    brute-force route, just amortised over all sub-boxes.
    """
    k, bounds = _check_bounds(k, bounds, ORACLE_MAX_K)
    cost = math.prod(bounds) * (k + 1)
    if math.prod(bounds) > ORACLE_MAX_PRODUCT:
        raise ValidationError("product of bounds exceeds the brute-force cap")
    check_budget(cost, budget, "oracle_prefix_table")
    table = np.zeros(bounds, dtype=object)
    it = np.nditer(table, flags=["multi_index", "refs_ok"])
    zero = Fraction(0)
    for _ in it:
        idx = it.multi_index
        prod = math.prod(i + 1 for i in idx)
        r = isqrt(prod)
        table[idx] = radical_weight(prod) if r * r == prod else zero
    for axis in range(k):
        np.cumsum(table, axis=axis, out=table)
    return table


def _kernel_tables(limit: int):
    """Squarefree kernel and distinct-prime tuple for every n <= limit."""
    spf = smallest_prime_factor(max(limit, 2))
    kern = [0] * (limit + 1)
    primes_of = [()] * (limit + 1)
    kern[1] = 1
    for n in range(2, limit + 1):
        m = n
        ps = []
        key = 1
        while m > 1:
            p = int(spf[m])
            ps.append(p)
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e % 2:
                key *= p
        kern[n] = key
        primes_of[n] = tuple(ps)
    return kern, primes_of


def count_fast(
    k: int,
    bounds,
    budget: int | None = None,
    threads: int | None = None,
) -> SquareCountResult:
    """Kernel-matching evaluation of T_k; exact rational, equal to the oracle.

    Coordinates are processed with the largest bound last, so the enumeration
    touches prod(sorted_bounds[:-1]) partial tuples and the final coordinate
    contributes only the values K * c^2 that cancel the running kernel K.
    The result is invariant under permutation of the bounds.
    """
    k, bounds = _check_bounds(k, bounds, FAST_MAX_K, FAST_MAX_BOUND)
    order = sorted(range(k), key=lambda i: bounds[i])
    sorted_bounds = [bounds[i] for i in order]
    partial = math.prod(sorted_bounds[:-1])
    nprimes = primes_up_to(isqrt(max(sorted_bounds))).size + primes_up_to(
        max(sorted_bounds)
    ).size
    check_budget(partial * max(1, nprimes), budget, "count_fast", FAST_DEFAULT_BUDGET)

    inner_limit = sorted_bounds[-2] if k >= 2 else 1
    leaf_bound = sorted_bounds[-1]
    kern, primes_of = _kernel_tables(max(inner_limit, isqrt(leaf_bound) + 1))
    # suffix_prod[i] = product of bounds for coordinates i..k-1
    suffix = [1] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix[i] = suffix[i + 1] * sorted_bounds[i]

    def leaf_primes(K: int):
        """Distinct primes of K (K is squarefree and may exceed the tables)."""
        m = K
        ps = []
        p = 2
        while p * p <= m:
            if m % p == 0:
                ps.append(p)
                m //= p
            p += 1 if p == 2 else 2
        if m > 1:
            ps.append(m)
        return ps

    def run(first_lo: int, first_hi: int) -> tuple[Fraction, int]:
        total = Fraction(0)
        count = 0
        seen: set[int] = set()

        def rec(i: int, K: int, weight: Fraction) -> None:
            nonlocal total, count
            if K > suffix[i]:
                return
            if i == k - 1:
                if K > leaf_bound:
                    return
                kp = [p for p in leaf_primes(K) if p not in seen]
                base = weight
                for p in kp:
                    base *= Fraction(p, p + 1)
                for p in kp:
                    seen.add(p)
                cmax = isqrt(leaf_bound // K)
                for c in range(1, cmax + 1):
                    w = base
                    for p in primes_of[c]:
                        if p not in seen:
                            w *= Fraction(p, p + 1)
                    total += w
                    count += 1
                for p in kp:
                    seen.discard(p)
                return
            lo = first_lo if i == 0 else 1
            hi = first_hi if i == 0 else sorted_bounds[i]
            for n in range(lo, hi + 1):
                kn = kern[n]
                g = gcd(K, kn)
                K2 = (K // g) * (kn // g)
                added = [p for p in primes_of[n] if p not in seen]
                w2 = weight
                for p in added:
                    w2 *= Fraction(p, p + 1)
                    seen.add(p)
                rec(i + 1, K2, w2)
                for p in added:
                    seen.discard(p)

        rec(0, 1, Fraction(1))
        return total, count

    workers = resolve_threads(threads)
    first_bound = sorted_bounds[0] if k >= 2 else 1
    if k == 1:
        # single coordinate: squares n = c^2 <= bound
        total = Fraction(0)
        count = 0
        for c in range(1, isqrt(bounds[0]) + 1):
            total += radical_weight(c * c)
            count += 1
        return SquareCountResult(k, bounds, total, count)
    if workers == 1 or first_bound < 2 * workers:
        total, count = run(1, first_bound)
    else:
        step = (first_bound + workers - 1) // workers
        spans = [
            (lo, min(lo + step - 1, first_bound))
            for lo in range(1, first_bound + 1, step)
        ]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: run(*s), spans))
        total = sum((p[0] for p in parts), Fraction(0))
        count = sum(p[1] for p in parts)
    return SquareCountResult(k, bounds, total, count)


def weighted_square_count_float(k: int, bounds, budget: int | None = None) -> float:
    """Float-valued T_k for grids too large for exact rationals.

    k = 2 runs a compiled mirror of the kernel decomposition; other k fall
    back to the exact routine.  Agrees with count_fast to float precision on
    overlapping domains.
    """
    k, bounds = _check_bounds(k, bounds, FAST_MAX_K, FAST_MAX_BOUND)
    if k != 2:
        return float(count_fast(k, bounds, budget=budget).value)
    b1, b2 = bounds
    est = math.sqrt(b1) * math.sqrt(b2) * (math.log(min(b1, b2)) + 2.0)
    check_budget(est, budget, "weighted_square_count_float")
    nmax = max(b1, b2, 2)
    spf = smallest_prime_factor(nmax)
    w = _kernels.radical_weight_table(nmax, spf)
    total, _count = _kernels.square_pair_weighted_sum(b1, b2, spf, w)
    return float(total)


def fit_log_polynomial(k: int, Y_grid, normalized_values) -> FitResult:
    """Least squares of given values against a degree-k(k-1)/2 polynomial in log Y.

    Columns of the Vandermonde design matrix are scaled to unit norm before
    solving; a rank-deficient design is an error, not a silent best effort.
    """
    k = int(k)
    degree = k * (k - 1) // 2
    grid = [int(y) for y in Y_grid]
    if len(set(grid)) != len(grid):
        raise ValidationError("Y grid values must be distinct")
    if len(grid) < degree + 2:
        raise ValidationError(f"need at least {degree + 2} grid points for k={k}")
    x = np.log(np.asarray(grid, dtype=np.float64))
    target = np.asarray(normalized_values, dtype=np.float64)
    if target.shape != x.shape:
        raise ValidationError("values must match the grid length")
    design = np.vander(x, degree + 1, increasing=True)
    scale = np.linalg.norm(design, axis=0)
    if np.any(scale == 0):
        raise NumericFailure("degenerate design matrix column")
    coef_scaled, _res, rank, _sv = np.linalg.lstsq(design / scale, target, rcond=None)
    if rank < degree + 1:
        raise NumericFailure(
            f"rank-deficient design matrix (rank {rank} < {degree + 1})"
        )
    coef = coef_scaled / scale
    residual = float(np.linalg.norm(design @ coef - target))
    return FitResult(
        k=k,
        degree=degree,
        coefficients=tuple(float(c) for c in coef),
        leading=float(coef[degree]),
        residual=residual,
    )


def fit_leading(k: int, Y_grid, budget: int | None = None) -> FitResult:
    """Fit T_k(Y)/Y^{k/2} on a grid; ``leading`` is the top log-power coefficient.

    That coefficient has an independent prediction (Euler product times
    polytope volume), which is what the acceptance comparison checks.
    """
    grid = sorted(int(y) for y in Y_grid)
    if grid and min(grid) < 100:
        raise ValidationError("grid values must be >= 100")
    k = int(k)
    values = [weighted_square_count_float(k, (y,) * k, budget=budget) for y in grid]
    normalized = np.asarray(values) / np.asarray(grid, dtype=np.float64) ** (k / 2.0)
    return fit_log_polynomial(k, grid, normalized)
