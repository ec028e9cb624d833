# mealy/preflight.py
# Guards run before the expensive constructions.
from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, Optional

from .errors import BudgetExhausted, NoSinkError, NotInvertibleError, NotReversibleError, PreconditionError

if TYPE_CHECKING:
    from .core import MealyAutomaton

logger = logging.getLogger(__name__)


def ensure_invertible(M: "MealyAutomaton") -> None:
    for q, row in zip(M.states, M.rho):
        if len(set(row)) != M.n_letters:
            raise NotInvertibleError(q)


def ensure_reversible(M: "MealyAutomaton") -> None:
    for a in range(M.n_letters):
        if len({M.delta[q][a] for q in range(M.n_states)}) != M.n_states:
            raise NotReversibleError(M.alphabet[a])


def ensure_sink(M: "MealyAutomaton", what: str = "operation") -> int:
    if M.sink is None:
        raise NoSinkError(what)
    return M.sink_id


def ensure_sa(M: "MealyAutomaton", what: str = "operation") -> int:
    """Invertible with a sink reachable from every state; returns the sink index."""
    from .core import classify

    e = ensure_sink(M, what)
    ensure_invertible(M)
    if not classify(M).sink_accessible:
        raise PreconditionError(f"{what}: sink {M.sink!r} is not accessible from every state")
    return e


def ensure_within(
    size: int,
    limit: int,
    *,
    budget: str,
    what: str = "",
    partial: Optional[Any] = None,
) -> None:
    """Raise BudgetExhausted once `size` passes `limit`."""
    if size > limit:
        logger.warning("budget %s=%d exhausted%s", budget, limit, f" ({what})" if what else "")
        raise BudgetExhausted(budget, limit, partial=partial, what=what)
