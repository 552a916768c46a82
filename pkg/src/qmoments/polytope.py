"""The pair-constraint polytope behind the geometric constant gamma_k.

For k >= 2 put r = k(k-1)/2 and index coordinates u_i by the pairs
(a, b), 1 <= a < b <= k, in lexicographic order.  The region is

    { u in R^r :  u_i >= 0  and  for every j <= k,
                  sum of u_i over the pairs containing j  <=  beta_j }.

With beta = (1, ..., 1) its volume is gamma_k (gamma_2 = 1, gamma_3 = 1/4
exactly); general positive beta gives the integral that appears as the
leading coefficient of the polynomial in the weighted square-product count.

Volumes are estimated by seeded Monte Carlo over the bounding box
prod_i [0, min(beta_a, beta_b)], sampled in fixed-size chunks whose
generators derive deterministically from (seed, chunk index), so the
estimate is reproducible and independent of any parallel scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import ValidationError

_CHUNK = 1 << 19


@dataclass(frozen=True)
class PairFormSystem:
    """Pair incidence system for k coordinates with per-coordinate caps beta."""

    k: int
    beta: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ValidationError("PairFormSystem requires k >= 2")
        beta = self.beta
        if beta is None:
            beta = (1.0,) * self.k
        beta = tuple(float(b) for b in beta)
        if len(beta) != self.k:
            raise ValidationError(f"beta must have length {self.k}")
        if any(b <= 0 for b in beta):
            raise ValidationError("beta entries must be strictly positive")
        object.__setattr__(self, "beta", beta)

    @property
    def r(self) -> int:
        return self.k * (self.k - 1) // 2

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """1-based index pairs in lexicographic order."""
        return tuple((a + 1, b + 1) for a, b in combinations(range(self.k), 2))

    def incidence(self) -> np.ndarray:
        """r x k 0/1 matrix; column j marks the pairs containing coordinate j."""
        mat = np.zeros((self.r, self.k), dtype=np.int8)
        for i, (a, b) in enumerate(combinations(range(self.k), 2)):
            mat[i, a] = 1
            mat[i, b] = 1
        return mat

    def box_limits(self) -> np.ndarray:
        """Per-pair upper bound min(beta_a, beta_b); the Monte Carlo box."""
        return np.array(
            [min(self.beta[a], self.beta[b]) for a, b in combinations(range(self.k), 2)]
        )


@dataclass(frozen=True)
class VolumeEstimate:
    system: PairFormSystem
    samples: int
    seed: int
    estimate: float
    stderr: float
    exact: Fraction | None = None

    def to_dict(self) -> dict:
        out = {
            "k": self.system.k,
            "beta": list(self.system.beta),
            "r": self.system.r,
            "samples": self.samples,
            "seed": self.seed,
            "estimate": self.estimate,
            "stderr": self.stderr,
        }
        if self.exact is not None:
            out["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        return out


def contains(system: PairFormSystem, u) -> bool:
    """Membership test: u >= 0 and every coordinate's pair sum is <= beta."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (system.r,):
        raise ValidationError(f"point must have dimension r = {system.r}")
    if np.any(u < 0):
        return False
    sums = u @ system.incidence()
    return bool(np.all(sums <= np.asarray(system.beta)))


def volume_exact_small(k: int) -> Fraction:
    """Exact unit-beta volumes for the two small cases with closed values."""
    if k == 2:
        return Fraction(1)
    if k == 3:
        return Fraction(1, 4)
    raise ValidationError(f"unsupported: exact volume known only for k in (2, 3), got {k}")


def volume_mc(
    system: PairFormSystem,
    samples: int,
    seed: int,
    chunk: int = _CHUNK,
) -> VolumeEstimate:
    """Hit-rate estimate of the polytope volume over its bounding box.

    Deterministic for fixed (samples, seed, chunk): chunk c draws from a
    generator seeded with SeedSequence([seed, c]), and hit counts merge by
    addition, so any parallel execution over chunks returns the same value.
    """
    samples = int(samples)
    if samples < 10 ** 4:
        raise ValidationError("samples must be >= 10^4")
    box = system.box_limits()
    box_vol = float(np.prod(box))
    mat = system.incidence().astype(np.float64)
    beta = np.asarray(system.beta)
    hits = 0
    done = 0
    ci = 0
    while done < samples:
        m = min(chunk, samples - done)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), ci]))
        u = rng.random((m, system.r)) * box
        ok = np.all(u @ mat <= beta, axis=1)
        hits += int(np.count_nonzero(ok))
        done += m
        ci += 1
    p_hat = hits / samples
    stderr = box_vol * float(np.sqrt(p_hat * (1.0 - p_hat) / samples))
    exact = None
    if system.k in (2, 3) and all(b == 1.0 for b in system.beta):
        exact = volume_exact_small(system.k)
    return VolumeEstimate(
        system=system,
        samples=samples,
        seed=int(seed),
        estimate=box_vol * p_hat,
        stderr=stderr,
        exact=exact,
    )
