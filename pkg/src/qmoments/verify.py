"""One-shot verification harness: every acceptance criterion as a function.

Each criterion returns a CriterionResult carrying the measured quantity, the
stated tolerance, and the verdict.  The pytest acceptance module and the CLI
``verify`` subcommand both dispatch here, so the numbers printed by either
are produced by the same code.  Scale parameters default to the full
desk-scale values; the CLI can shrink them for quick runs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis, arith, constants, moments, polytope, squarecount, theta
from .errors import ValidationError


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    measured: str
    tolerance: str
    runtime_seconds: float
    details: dict = field(default_factory=dict)

    def format_line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} criterion {self.index:2d} [{self.name}] "
            f"measured: {self.measured}; tolerance: {self.tolerance} "
            f"({self.runtime_seconds:.1f}s)"
        )

    def to_dict(self) -> dict:
        return {
            "criterion": self.index,
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "runtime_seconds": self.runtime_seconds,
            "details": self.details,
        }


def definition_filter(X: int) -> np.ndarray:
    """Per-integer filter: apply the discriminant definition to every n <= X.

    Squarefreeness is tested by direct divisibility against every prime
    square, independently of the segmented sieve used by the enumerator.
    """
    n = np.arange(1, X + 1, dtype=np.int64)
    sf = np.ones(X, dtype=bool)
    for p in arith.primes_up_to(math.isqrt(X)).tolist():
        sf &= (n % (p * p)) != 0
    is_odd_case = ((n % 4) == 1) & sf & (n > 1)
    is_even_case = np.zeros(X, dtype=bool)
    mask4 = (n % 4) == 0
    m = n[mask4] // 4
    mrem = m % 4
    is_even_case[mask4] = sf[m - 1] & ((mrem == 2) | (mrem == 3))
    return n[is_odd_case | is_even_case]


def criterion_kronecker_euler(p_max: int = 1000) -> CriterionResult:
    """1: (p|n) matches the Euler criterion for every prime p ≡ 1 (mod 4)."""
    t0 = time.perf_counter()
    mismatches = 0
    checked = 0
    for p in arith.primes_up_to(p_max - 1).tolist():
        if p % 4 != 1:
            continue
        e = (p - 1) // 2
        for n in range(1, p):
            euler = pow(n, e, p)
            euler = -1 if euler == p - 1 else euler
            if arith.kronecker(p, n) != euler:
                mismatches += 1
            checked += 1
    return CriterionResult(
        1,
        "kronecker-euler",
        mismatches == 0,
        f"{mismatches} mismatches over {checked} pairs",
        "zero mismatches",
        time.perf_counter() - t0,
    )


def criterion_enumeration(x: int = 10 ** 6) -> CriterionResult:
    """2: segmented sieve equals the per-integer definition filter."""
    t0 = time.perf_counter()
    reference = definition_filter(x)
    ok = True
    for seg in (1 << 14, 1 << 17):
        got = np.fromiter(
            (d.d for d in arith.enumerate_fundamental(x, segment_size=seg)),
            dtype=np.int64,
        )
        ok = ok and got.size == reference.size and bool(np.array_equal(got, reference))
    return CriterionResult(
        2,
        "enumeration",
        ok,
        f"{reference.size} discriminants <= {x}, two segment sizes",
        "exact set equality",
        time.perf_counter() - t0,
    )


def criterion_orthogonality(x: int = 10 ** 7) -> CriterionResult:
    """3: square arguments scale by prod p/(p+1); non-squares cancel."""
    t0 = time.perf_counter()
    kappa = arith.char_sum_over_discriminants(1, x) / x
    worst_dev = 0.0
    for m in (2, 3, 5, 6):
        weight = float(arith.radical_weight(m))
        ratio = arith.char_sum_over_discriminants(m * m, x) / (x * weight)
        worst_dev = max(worst_dev, abs(ratio / kappa - 1.0))
    worst_cancel = 0.0
    for n in (2, 3, 5, 7):
        s = abs(arith.char_sum_over_discriminants(n, x))
        bound = 10.0 * math.sqrt(x) * n ** 0.25 * math.log(n + 1)
        worst_cancel = max(worst_cancel, s / bound)
    passed = worst_dev <= 0.01 and worst_cancel <= 1.0
    return CriterionResult(
        3,
        "orthogonality",
        passed,
        f"kappa={kappa:.6f}, square-ratio dev {worst_dev:.2e}, cancellation ratio {worst_cancel:.2e}",
        "dev <= 1e-2 and ratio <= 1",
        time.perf_counter() - t0,
        {"kappa_emp": kappa, "six_over_pi2": 6 / math.pi ** 2, "three_over_pi2": 3 / math.pi ** 2},
    )


def criterion_moment_consistency(x: int = 10 ** 7, y: int = 10) -> CriterionResult:
    """4: S_2(X, Y) matches kappa_emp * X * T_2(Y) within 5 percent."""
    t0 = time.perf_counter()
    rec = moments.moment(x, y, 2)
    kappa = arith.char_sum_over_discriminants(1, x) / x
    t2 = float(squarecount.count_fast(2, (y, y)).value)
    predicted = kappa * x * t2
    rel = abs(rec.abs_sum - predicted) / rec.abs_sum
    return CriterionResult(
        4,
        "moment-consistency",
        rel <= 0.05,
        f"S_2={rec.abs_sum}, kappa*X*T_2={predicted:.1f}, rel dev {rel:.2e}",
        "rel dev <= 0.05",
        time.perf_counter() - t0,
        {"S_2": str(rec.abs_sum), "kappa_emp": kappa, "T_2": t2},
    )


def criterion_squarecount_equivalence(
    bound: int = 30, k4_samples: int = 50, seed: int = 20_240_817
) -> CriterionResult:
    """5: count_fast equals the enumeration oracle as exact rationals."""
    t0 = time.perf_counter()
    mismatches = 0
    checked = 0
    table2 = squarecount.oracle_prefix_table(2, (bound, bound))
    for b1 in range(1, bound + 1):
        for b2 in range(1, bound + 1):
            if squarecount.count_fast(2, (b1, b2)).value != table2[b1 - 1, b2 - 1]:
                mismatches += 1
            checked += 1
    table3 = squarecount.oracle_prefix_table(3, (bound, bound, bound))
    for b1 in range(1, bound + 1):
        for b2 in range(1, bound + 1):
            for b3 in range(1, bound + 1):
                if (
                    squarecount.count_fast(3, (b1, b2, b3)).value
                    != table3[b1 - 1, b2 - 1, b3 - 1]
                ):
                    mismatches += 1
                checked += 1
    rng = np.random.default_rng(seed)
    table4 = squarecount.oracle_prefix_table(4, (bound, bound, bound, bound))
    for _ in range(k4_samples):
        bs = tuple(int(v) for v in rng.integers(1, bound + 1, size=4))
        if squarecount.count_fast(4, bs).value != table4[tuple(b - 1 for b in bs)]:
            mismatches += 1
        checked += 1
    return CriterionResult(
        5,
        "squarecount-equivalence",
        mismatches == 0,
        f"{mismatches} mismatches over {checked} bound vectors",
        "exact rational equality",
        time.perf_counter() - t0,
    )


def criterion_fit_leading(cutoff: int = 10 ** 6) -> CriterionResult:
    """6: fitted leading coefficient of T_2(Y)/Y matches c_2 * gamma_2."""
    t0 = time.perf_counter()
    grid = [10 ** 3, 3162, 10 ** 4, 31623, 10 ** 5, 316228, 10 ** 6]
    fit = squarecount.fit_leading(2, grid)
    c2 = constants.euler_ck(2, cutoff).partial
    gamma2 = float(polytope.volume_exact_small(2))
    target = c2 * gamma2
    rel = abs(fit.leading / target - 1.0)
    return CriterionResult(
        6,
        "fit-leading",
        rel <= 0.10,
        f"fit {fit.leading:.6f} vs c_2*gamma_2 {target:.6f}, rel dev {rel:.2e}",
        "rel dev <= 0.10",
        time.perf_counter() - t0,
        {"fit": fit.to_dict(), "c_2": c2},
    )


def criterion_polytope(samples: int = 10 ** 7, seeds: tuple[int, int] = (1, 2)) -> CriterionResult:
    """7: unit-beta volume fixtures, exact at k=2 and 3-sigma at k=3."""
    t0 = time.perf_counter()
    est2 = polytope.volume_mc(polytope.PairFormSystem(2), 10 ** 4, seed=seeds[0])
    ok = est2.estimate == 1.0
    sys3 = polytope.PairFormSystem(3)
    devs = []
    for seed in seeds:
        est3 = polytope.volume_mc(sys3, samples, seed=seed)
        devs.append(abs(est3.estimate - 0.25) / est3.stderr)
        ok = ok and abs(est3.estimate - 0.25) <= 3.0 * est3.stderr
    return CriterionResult(
        7,
        "polytope-fixtures",
        ok,
        f"k=2 exact {est2.estimate}, k=3 deviations {devs[0]:.2f} and {devs[1]:.2f} sigma",
        "k=2 == 1 exactly; k=3 within 3 sigma of 1/4",
        time.perf_counter() - t0,
    )


def criterion_euler_convergence() -> CriterionResult:
    """8: cutoff stability, monotone tail gaps, and the exact p=2 factor."""
    t0 = time.perf_counter()
    ok = True
    worst = 0.0
    for k in (2, 3, 4):
        gaps = [constants.euler_ck(k, cut).tail_gap for cut in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)]
        diff = abs(
            constants.euler_ck(k, 10 ** 6).partial - constants.euler_ck(k, 10 ** 5).partial
        )
        worst = max(worst, diff)
        ok = ok and diff <= 1e-6
        ok = ok and all(gaps[i + 1] <= gaps[i] for i in range(len(gaps) - 1))
    lf = constants.local_factor(2, 2)
    ok = ok and abs(lf - 13.0 / 24.0) <= 1e-12
    return CriterionResult(
        8,
        "euler-convergence",
        ok,
        f"max |c_k(1e6)-c_k(1e5)| = {worst:.2e}, local(2,2) off by {abs(lf - 13 / 24):.1e}",
        "diff <= 1e-6, gaps nonincreasing, 12 digits at p=2",
        time.perf_counter() - t0,
    )


def criterion_theta_functional(d_max: int = 200) -> CriterionResult:
    """9: theta(1/t) = sqrt(t) theta(t) across the family and four t values."""
    t0 = time.perf_counter()
    worst = 0.0
    for d in arith.fundamental_discriminants(d_max).tolist():
        for t in (1.0 / 3.0, 0.5, 2.0, 3.0):
            lhs = theta.theta(d, 1.0 / t).value
            rhs = math.sqrt(t) * theta.theta(d, t).value
            scale = max(abs(lhs), abs(rhs), 1e-300)
            worst = max(worst, abs(lhs - rhs) / scale)
    return CriterionResult(
        9,
        "theta-functional-equation",
        worst <= 1e-9,
        f"worst relative defect {worst:.2e}",
        "relative error <= 1e-9",
        time.perf_counter() - t0,
    )


def criterion_second_moment(
    xs: tuple[int, ...] = (10 ** 4, 3 * 10 ** 4, 10 ** 5, 3 * 10 ** 5)
) -> CriterionResult:
    """10: the normalised second moment stays in a factor-2 window."""
    t0 = time.perf_counter()
    ratios = [theta.second_moment_ratio(x) for x in xs]
    window = max(ratios) / min(ratios)
    steps = [
        abs(ratios[i + 1] - ratios[i]) / ratios[i] for i in range(len(ratios) - 1)
    ]
    passed = window <= 2.0 and all(s < 0.15 for s in steps)
    return CriterionResult(
        10,
        "theta-second-moment",
        passed,
        f"ratios {['%.5f' % r for r in ratios]}, window {window:.3f}, max step {max(steps):.3f}",
        "window <= 2 and steps < 0.15",
        time.perf_counter() - t0,
        {"ratios": ratios},
    )


def criterion_nonvanishing(x: int = 10 ** 5, threshold: float = 1e-10) -> CriterionResult:
    """11: certified non-zero theta values outnumber X / log X."""
    t0 = time.perf_counter()
    count, frac = theta.nonvanishing_census(x, threshold)
    need = x / math.log(x)
    return CriterionResult(
        11,
        "theta-nonvanishing",
        count > need,
        f"count {count} (fraction {frac:.4f}) vs X/log X = {need:.0f}",
        "count > X / log X",
        time.perf_counter() - t0,
    )


def criterion_integral_witness() -> CriterionResult:
    """12: I(L)/sqrt(L) bounded over five decades, quadrature self-consistent."""
    t0 = time.perf_counter()
    values = [analysis.integral_I(L).over_sqrt_log for L in (1e2, 1e3, 1e4, 1e5, 1e6)]
    window = max(values) / min(values)
    coarse = analysis.integral_I(1e4, rel_tol=1e-6)
    fine = analysis.integral_I(1e4, rel_tol=5e-7)
    self_ok = abs(coarse.value - fine.value) <= 1e-6 * abs(coarse.value)
    return CriterionResult(
        12,
        "integral-witness",
        window <= 4.0 and self_ok,
        f"I/sqrt window {window:.3f}, halving shift {abs(coarse.value - fine.value) / coarse.value:.2e}",
        "window <= 4 and halving within coarser tolerance",
        time.perf_counter() - t0,
        {"values": values},
    )


def criterion_abel(cases: int = 10 ** 4, seed: int = 20_240_817) -> CriterionResult:
    """13: the partial-summation inequality on random bounded sequences."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(cases):
        n = int(rng.integers(1, 101))
        a = rng.uniform(-1.0, 1.0, size=n)
        b = rng.uniform(-1.0, 1.0, size=n)
        if not analysis.abel_bound_check(a, b).holds:
            violations += 1
    return CriterionResult(
        13,
        "abel-bound",
        violations == 0,
        f"{violations} violations over {cases} random instances",
        "zero violations",
        time.perf_counter() - t0,
    )


def criterion_determinism(x: int = 10 ** 7, y: int = 10) -> CriterionResult:
    """14: exact outputs are bit-identical for worker counts 1, 2 and 8."""
    t0 = time.perf_counter()
    ok = True
    for n in (1, 2, 4):
        vals = {arith.char_sum_over_discriminants(n, x, threads=w) for w in (1, 2, 8)}
        ok = ok and len(vals) == 1
    recs = [moments.moment(x, y, 2, threads=w) for w in (1, 2, 8)]
    ok = ok and len({r.signed_sum for r in recs}) == 1
    ok = ok and len({r.abs_sum for r in recs}) == 1
    counts = {squarecount.count_fast(3, (20, 25, 30), threads=w).value for w in (1, 2, 8)}
    ok = ok and len(counts) == 1
    return CriterionResult(
        14,
        "thread-determinism",
        ok,
        "family sums, moment, and square count across workers {1, 2, 8}",
        "bit-identical exact outputs",
        time.perf_counter() - t0,
    )


_ALL = {
    1: criterion_kronecker_euler,
    2: criterion_enumeration,
    3: criterion_orthogonality,
    4: criterion_moment_consistency,
    5: criterion_squarecount_equivalence,
    6: criterion_fit_leading,
    7: criterion_polytope,
    8: criterion_euler_convergence,
    9: criterion_theta_functional,
    10: criterion_second_moment,
    11: criterion_nonvanishing,
    12: criterion_integral_witness,
    13: criterion_abel,
    14: criterion_determinism,
}

SUITES = {
    "orthogonality": (3,),
    "consistency": (4,),
    "squarecount": (5, 6),
    "polytope": (7,),
    "theta": (9, 10, 11),
    "intreal": (12,),
    "all": tuple(range(1, 15)),
}


def run_suite(suite: str, x: int | None = None) -> list[CriterionResult]:
    """Run a named criterion suite; ``x`` rescales the family-size criteria."""
    if suite not in SUITES:
        raise ValidationError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    results = []
    for idx in SUITES[suite]:
        fn = _ALL[idx]
        if x is not None and idx in (2, 3, 4, 11, 14):
            results.append(fn(x=int(x)))
        else:
            results.append(fn())
    return results
