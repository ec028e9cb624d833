# mealy/errors.py
from __future__ import annotations

from typing import Any, Optional, Sequence, Tuple


class MealyError(ValueError):
    """Base class; every library failure is a ValueError with a readable message."""


class ParseError(MealyError):
    def __init__(self, message: str, *, line: Optional[int] = None, source: str = "") -> None:
        self.line = line
        self.source = source
        where = ""
        if source:
            where = f"{source}:"
        if line is not None:
            where = f"{where}{line}:"
        super().__init__(f"PARSE: {where} {message}".replace(": :", ":").strip())


class IncompleteError(MealyError):
    def __init__(self, missing: Sequence[Tuple[str, str]]) -> None:
        self.missing = tuple(missing)
        pairs = ", ".join(f"({q},{a})" for q, a in self.missing)
        super().__init__(f"INCOMPLETE: missing transitions {pairs}")


class DuplicateTransitionError(MealyError):
    def __init__(self, state: str, letter: str, *, line: Optional[int] = None) -> None:
        self.state = state
        self.letter = letter
        self.line = line
        at = f" (line {line})" if line is not None else ""
        super().__init__(f"DUPLICATE: transition ({state},{letter}) defined twice{at}")


class SinkMismatchError(MealyError):
    def __init__(self, state: str) -> None:
        self.state = state
        super().__init__(f"SINK: declared sink {state!r} does not fix every letter with self-loops")


class UnknownSymbolError(MealyError):
    def __init__(self, kind: str, token: str) -> None:
        self.kind = kind
        self.token = token
        super().__init__(f"UNKNOWN: {kind} {token!r}")


class NotInvertibleError(MealyError):
    def __init__(self, state: str) -> None:
        self.state = state
        super().__init__(f"NOT INVERTIBLE: output map of state {state!r} is not a permutation")


class NotReversibleError(MealyError):
    def __init__(self, letter: str) -> None:
        self.letter = letter
        super().__init__(f"NOT REVERSIBLE: letter {letter!r} does not permute the states")


class NoSinkError(MealyError):
    def __init__(self, what: str = "operation") -> None:
        super().__init__(f"NO SINK: {what} needs an automaton with a sink state")


class PreconditionError(MealyError):
    pass


class PartitionError(MealyError):
    def __init__(self, colors: Sequence[str]) -> None:
        self.colors = tuple(colors)
        super().__init__(
            "PARTITION: colors used on both state and letter edges: " + ", ".join(self.colors)
        )


class CompletionError(MealyError):
    def __init__(self, state: str, reason: str) -> None:
        self.state = state
        super().__init__(f"COMPLETION: cannot complete state {state!r}: {reason}")


class BudgetExhausted(MealyError):
    def __init__(self, budget: str, limit: int, *, partial: Any = None, what: str = "") -> None:
        self.budget = budget
        self.limit = limit
        self.partial = partial
        label = f" while {what}" if what else ""
        super().__init__(f"BUDGET: {budget} cap {limit} exceeded{label}")


class UsageError(MealyError):
    pass


class InternalError(MealyError):
    """A computed witness failed its own check."""

    def __init__(self, message: str) -> None:
        super().__init__(f"INTERNAL: {message}")
