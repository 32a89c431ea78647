"""Iteration budgets. Budgets count inner-loop iterations, never seconds."""

import os

from .errors import BudgetExceeded

FIELD_BUDGET = 2**16
ENV_VAR = "CHARSUM_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw:
        return int(float(raw))
    return 10**8


def check(what: str, needed: int, budget: int | None = None) -> None:
    if budget is None:
        budget = default_budget()
    if needed > budget:
        raise BudgetExceeded(what, needed, budget)
