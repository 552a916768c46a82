"""The Euler-product constant c_k and the predicted main-term constant.

The local factor at a prime p is

    (1 - 1/p)^{k(k+1)/2} / (1 + 1/p)
        * ( 1/p + [ (1 - 1/sqrt(p))^{-k} + (1 + 1/sqrt(p))^{-k} ] / 2 ),

which is 1 + O(1/p^2), so the product over primes converges absolutely.
Because the bracket is symmetric in +-1/sqrt(p) it is actually a rational
number; ``local_factor_exact`` evaluates it with exact arithmetic and serves
as the oracle for the floating implementation.

The full predicted constant for the k-th moment is c_k * gamma_k / zeta(2),
where gamma_k is the pair-constraint polytope volume (exact for k <= 3,
Monte Carlo above) and zeta(2) = pi^2 / 6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .arith import primes_up_to
from .errors import ValidationError

ZETA2 = math.pi ** 2 / 6.0

DEFAULT_CUTOFF = 10 ** 5
DEFAULT_GAMMA_SAMPLES = 400_000
DEFAULT_GAMMA_SEED = 20_240_817


@dataclass(frozen=True)
class EulerProductEstimate:
    k: int
    prime_cutoff: int
    partial: float
    tail_gap: float


@dataclass(frozen=True)
class PredictedConstant:
    k: int
    prime_cutoff: int
    c_k: float
    tail_gap: float
    zeta2: float
    gamma_k: float
    gamma_k_stderr: float
    predicted: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "cutoff": self.prime_cutoff,
            "c_k": self.c_k,
            "tail_gap": self.tail_gap,
            "zeta2": self.zeta2,
            "gamma_k": self.gamma_k,
            "gamma_k_stderr": self.gamma_k_stderr,
            "predicted": self.predicted,
        }


def local_factor(k: int, p: int) -> float:
    """Euler factor at p, double precision; strictly positive, 1 + O(1/p^2)."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    if p < 2:
        raise ValidationError("p must be a prime >= 2")
    s = 1.0 / math.sqrt(p)
    # (1 +- s)^{-k} via exp(-k log1p(+-s)) keeps full precision for small s.
    bracket = 0.5 * (math.exp(-k * math.log1p(-s)) + math.exp(-k * math.log1p(s)))
    head = math.exp(k * (k + 1) / 2.0 * math.log1p(-1.0 / p)) / (1.0 + 1.0 / p)
    return head * (1.0 / p + bracket)


def local_factor_exact(k: int, p: int) -> Fraction:
    """Exact rational value of the Euler factor (test oracle).

    (1-s)^{-k} + (1+s)^{-k} = [ (1+s)^k + (1-s)^k ] / (1 - 1/p)^k with
    s^2 = 1/p, and the even binomial sum is rational in 1/p.
    """
    if k < 1 or p < 2:
        raise ValidationError("need k >= 1 and prime p >= 2")
    inv = Fraction(1, p)
    even_sum = 2 * sum(comb(k, 2 * i) * inv ** i for i in range(k // 2 + 1))
    bracket = even_sum / (2 * (1 - inv) ** k)
    head = (1 - inv) ** (k * (k + 1) // 2) / (1 + inv)
    return head * (inv + bracket)


def euler_ck(k: int, prime_cutoff: int) -> EulerProductEstimate:
    """Partial Euler product over p <= cutoff, with the half-cutoff gap.

    The gap |partial(cutoff) - partial(cutoff/2)| is the reported empirical
    error proxy; the factors are 1 + O(1/p^2) so the true tail beyond the
    cutoff is of the same order.
    """
    k = int(k)
    prime_cutoff = int(prime_cutoff)
    if prime_cutoff < 2:
        raise ValidationError("prime_cutoff must be >= 2")
    primes = primes_up_to(prime_cutoff)
    half = prime_cutoff // 2
    partial = 1.0
    at_half = 1.0
    for p in primes.tolist():
        if p > half and at_half == 1.0:
            at_half = partial
        partial *= local_factor(k, p)
    if at_half == 1.0:
        at_half = partial
    return EulerProductEstimate(k, prime_cutoff, partial, abs(partial - at_half))


def _gamma(k: int, samples: int, seed: int) -> tuple[float, float]:
    """(gamma_k, stderr); exact for k <= 3, seeded Monte Carlo beyond."""
    if k == 1:
        return 1.0, 0.0  # no pair constraints: zero-dimensional unit volume
    from . import polytope

    if k in (2, 3):
        return float(polytope.volume_exact_small(k)), 0.0
    system = polytope.PairFormSystem(k)
    est = polytope.volume_mc(system, samples=samples, seed=seed)
    return est.estimate, est.stderr


@lru_cache(maxsize=32)
def predicted_constant(
    k: int,
    prime_cutoff: int = DEFAULT_CUTOFF,
    gamma_samples: int = DEFAULT_GAMMA_SAMPLES,
    gamma_seed: int = DEFAULT_GAMMA_SEED,
) -> PredictedConstant:
    """c_k * gamma_k / zeta(2) with the Monte Carlo error propagated."""
    k = int(k)
    if k < 1:
        raise ValidationError("k must be >= 1")
    est = euler_ck(k, prime_cutoff)
    gamma, gamma_err = _gamma(k, gamma_samples, gamma_seed)
    return PredictedConstant(
        k=k,
        prime_cutoff=est.prime_cutoff,
        c_k=est.partial,
        tail_gap=est.tail_gap,
        zeta2=ZETA2,
        gamma_k=gamma,
        gamma_k_stderr=gamma_err,
        predicted=est.partial * gamma / ZETA2,
    )
