"""Shared error types and runtime limits (operation budget, thread count).

Every expensive operation estimates its cost up front and refuses to start
when the estimate exceeds the budget.  The budget and worker count can be
overridden per call or through the environment variables ``QMOMENTS_BUDGET``
and ``QMOMENTS_THREADS`` (the only environment overrides the package honours).
"""

from __future__ import annotations

import os

DEFAULT_BUDGET = 2 ** 40
DEFAULT_THREADS = 1

_BUDGET_ENV = "QMOMENTS_BUDGET"
_THREADS_ENV = "QMOMENTS_THREADS"


class ValidationError(ValueError):
    """A parameter failed an operation's precondition (CLI exit code 2)."""


class BudgetExceeded(RuntimeError):
    """Estimated cost exceeds the operation budget (CLI exit code 3)."""

    def __init__(self, message: str, estimated_cost: float, budget: float):
        super().__init__(message)
        self.estimated_cost = estimated_cost
        self.budget = budget


class NumericFailure(RuntimeError):
    """A numerical routine failed to converge or overflowed (CLI exit code 4)."""


def resolve_budget(budget: int | None = None, default: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get(_BUDGET_ENV)
    if env:
        return int(env)
    return DEFAULT_BUDGET if default is None else int(default)


def resolve_threads(threads: int | None = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get(_THREADS_ENV)
    return max(1, int(env)) if env else DEFAULT_THREADS


def check_budget(
    estimated_cost: float,
    budget: int | None,
    what: str,
    default: int | None = None,
) -> None:
    limit = resolve_budget(budget, default)
    if estimated_cost > limit:
        raise BudgetExceeded(
            f"{what}: estimated cost {estimated_cost:.4g} exceeds budget {limit:.4g}",
            estimated_cost=estimated_cost,
            budget=limit,
        )
