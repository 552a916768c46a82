"""Auxiliary analytic bounds: the plateau-decay weight g, a singular double
integral, and the partial-summation inequality.

The weight g(x) is log X on [0, 1/log X], then 1/x up to 10, then log log x
up to a configurable cap, then log X again.  The two inner branches disagree
at x = 10 (1/10 versus log log 10); the log log branch wins there so that g
is a total deterministic function, and the jump is documented rather than
hidden.

The double integral

    I(L) = integral over [1/L, 10]^2 of
           (xy)^{-3/4} (y-x)^{-1/2} (x+y)^{-1/2} [y - x >= 1/L] dx dy

grows like sqrt(L).  It is evaluated after the substitution u = y - x and a
log-log change of variables that turns the power-law edges into smooth
exponentials, so ordinary adaptive quadrature converges quickly.

The partial-summation bound states |sum a_n b_n| <= (M + V) max_n |A_n| with
A_n the partial sums of a, M = max |b_n| and V the total variation of b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import NumericFailure, ValidationError


@dataclass(frozen=True)
class GParams:
    """Branch points for the weight g; requires 1/log_x < 10 < exp_cap."""

    log_x: float
    exp_cap: float = 1e12

    def __post_init__(self):
        if self.log_x <= 0:
            raise ValidationError("log_x must be positive")
        if not (1.0 / self.log_x < 10.0 < self.exp_cap):
            raise ValidationError("branch points must satisfy 1/log_x < 10 < exp_cap")


def g(x: float, params: GParams) -> float:
    """Plateau, reciprocal decay, then doubly-logarithmic growth."""
    if x < 0:
        raise ValidationError("g is defined for x >= 0")
    if x <= 1.0 / params.log_x or x >= params.exp_cap:
        return params.log_x
    if x < 10.0:
        return 1.0 / x
    return math.log(math.log(x))


@dataclass(frozen=True)
class IntegralResult:
    log_x: float
    value: float
    abs_error: float

    @property
    def over_sqrt_log(self) -> float:
        return self.value / math.sqrt(self.log_x)

    def to_dict(self) -> dict:
        return {
            "logX": self.log_x,
            "I": self.value,
            "I_over_sqrtlog": self.over_sqrt_log,
        }


def integral_I(log_x: float, rel_tol: float = 1e-6, upper: float = 10.0) -> IntegralResult:
    """Adaptive evaluation of the singular double integral I(log_x).

    After u = y - x, both variables run over [1/L, upper]-type ranges with
    integrable power singularities at the lower edges; mapping each to its
    logarithm gives the bounded smooth integrand

        x^{1/4} u^{1/2} (x + u)^{-3/4} (2x + u)^{-1/2}

    (the extra x*u is the Jacobian).  Nested one-dimensional adaptive
    quadrature then meets the requested relative tolerance; failure to
    converge raises instead of returning a silent guess.  ``upper`` exists
    only so region handling can be exercised down to the empty case.
    """
    if log_x < 2:
        raise ValidationError("log_x must be >= 2")
    L = float(log_x)
    eps = 1.0 / L
    if eps >= upper:
        return IntegralResult(L, 0.0, 0.0)
    inner_tol = rel_tol / 8.0

    def inner(a: float) -> float:
        x = math.exp(a)
        top = upper - x
        if top <= eps:
            return 0.0

        def f(b: float) -> float:
            u = math.exp(b)
            return (
                x ** 0.25
                * math.sqrt(u)
                * (x + u) ** -0.75
                / math.sqrt(2.0 * x + u)
            )

        val, _err = integrate.quad(
            f, math.log(eps), math.log(top), epsabs=0.0, epsrel=inner_tol, limit=200
        )
        return val

    value, err = integrate.quad(
        inner, math.log(eps), math.log(upper), epsabs=0.0, epsrel=rel_tol / 2.0, limit=200
    )
    if not math.isfinite(value) or (value > 0 and err / value > 10.0 * rel_tol):
        raise NumericFailure(
            f"quadrature did not reach the requested tolerance (err {err:g} on {value:g})"
        )
    return IntegralResult(L, value, err)


@dataclass(frozen=True)
class AbelCheck:
    lhs: float
    rhs: float
    holds: bool


def abel_bound_check(a, b, slack: float | None = None) -> AbelCheck:
    """Evaluate both sides of the partial-summation inequality on real data."""
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if len(a) != len(b) or not a:
        raise ValidationError("a and b must be non-empty sequences of equal length")
    lhs = abs(math.fsum(x * y for x, y in zip(a, b)))
    m = max(abs(y) for y in b)
    v = math.fsum(abs(b[i] - b[i + 1]) for i in range(len(b) - 1))
    peak = 0.0
    run = 0.0
    for x in a:
        run += x
        peak = max(peak, abs(run))
    rhs = (m + v) * peak
    if slack is None:
        slack = 1e-12 * max(1.0, rhs)
    return AbelCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs + slack)
