# mealy/group.py
# -----------------------------------------------------------------------------
# PURPOSE: Computations in the group G(M): identity and order tests by section
#          closure, boundary points u·v^ω and their exact action, stabilizer
#          and singularity witnesses, positive relations and the λ/ψ edge
#          statistics over orbital balls.
# CONTRACT:
#   - Exact procedures raise BudgetExhausted; searches never do, they return a
#     WitnessReport with budget_exhausted set.
#   - Searches run breadth-first in certificate size, lexicographic inside a
#     size class, so reported witnesses are minimal and reproducible.
# -----------------------------------------------------------------------------
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .config import DEFAULT_BUDGET, Budget
from .core import ActionTable, LetterWord, MealyAutomaton, StateWord, dual, parse_letter_word
from .errors import BudgetExhausted, PreconditionError
from .preflight import ensure_invertible, ensure_reversible, ensure_sa, ensure_within

logger = logging.getLogger(__name__)


# =========================================================
# 1) Boundary points
# =========================================================
def _primitive_root(word: Tuple[str, ...]) -> Tuple[str, ...]:
    n = len(word)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and word[i] != word[k]:
            k = fail[k - 1]
        if word[i] == word[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return word[:p] if n % p == 0 else word


@dataclass(frozen=True)
class EventuallyPeriodicWord:
    """The boundary point preperiod·period^ω, always stored in canonical form."""

    preperiod: LetterWord
    period: LetterWord

    def __post_init__(self) -> None:
        pre, per = tuple(self.preperiod), tuple(self.period)
        if not per:
            raise ValueError("period must be nonempty")
        per = _primitive_root(per)
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = (per[-1],) + per[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def periodic(cls, period: Sequence[str]) -> "EventuallyPeriodicWord":
        return cls((), tuple(period))

    @property
    def is_periodic(self) -> bool:
        return not self.preperiod

    def tail(self) -> "EventuallyPeriodicWord":
        return EventuallyPeriodicWord((), self.period)

    def prefix(self, length: int) -> LetterWord:
        out = list(self.preperiod[:length])
        while len(out) < length:
            out.extend(self.period)
        return tuple(out[:length])

    def cofinal(self, other: "EventuallyPeriodicWord") -> bool:
        a, b = self.period, other.period
        return len(a) == len(b) and any(a[i:] + a[:i] == b for i in range(len(a)))

    def to_text(self) -> str:
        sep = "" if all(len(x) == 1 for x in self.preperiod + self.period) else " "
        return f"{sep.join(self.preperiod)}|{sep.join(self.period)}"

    def __str__(self) -> str:
        return self.to_text()


EPW = EventuallyPeriodicWord


def parse_epw(M: MealyAutomaton, text: str) -> EventuallyPeriodicWord:
    """`pre|period`, e.g. `01|2` for 01·2^ω and `|1` for 1^ω."""
    if "|" not in text:
        raise ValueError(f"boundary point needs 'pre|period', got {text!r}")
    pre, per = text.split("|", 1)
    return EventuallyPeriodicWord(parse_letter_word(M, pre), parse_letter_word(M, per))


# =========================================================
# 2) Reports
# =========================================================
@dataclass(frozen=True)
class WitnessReport:
    found: bool
    witness: Optional[StateWord] = None
    exponent: Optional[int] = None
    letters: Optional[LetterWord] = None
    budget_exhausted: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.found

    def to_json(self) -> Dict[str, Any]:
        witness = None
        if self.found:
            witness = {"u": list(self.witness or ())}
            if self.exponent is not None:
                witness["n"] = self.exponent
            if self.letters is not None:
                witness["v"] = list(self.letters)
        doc = {"found": self.found, "witness": witness, "budget_exhausted": self.budget_exhausted}
        doc.update(self.details)
        return doc


@dataclass(frozen=True)
class Order:
    value: int
    exact: bool

    def to_json(self) -> Dict[str, Any]:
        return {"exact": self.value} if self.exact else {"at_least": self.value}


# =========================================================
# 3) Identity and order
# =========================================================
def identity_ids(t: ActionTable, u: Sequence[int], limit: int) -> bool:
    """Section closure of the normalized word; False at the first moved letter."""
    w0 = t.normalize(u)
    if not w0:
        return True
    seen = {w0}
    queue = deque([w0])
    n_letters = len(t.letters)
    while queue:
        w = queue.popleft()
        for a in range(n_letters):
            out, res = t.section(w, a)
            if out != a:
                return False
            r = t.normalize(res)
            if r and r not in seen:
                seen.add(r)
                ensure_within(len(seen), limit, budget="closure", what="identity test")
                queue.append(r)
    return True


def is_identity(M: MealyAutomaton, u: Sequence[str], budget: Budget = DEFAULT_BUDGET) -> bool:
    t = M.table
    return identity_ids(t, t.state_ids(u), budget.closure)


def order(
    M: MealyAutomaton,
    u: Sequence[str],
    cap: Optional[int] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> Order:
    cap = budget.cap if cap is None else int(cap)
    t = M.table
    ids = t.state_ids(u)
    for n in range(1, cap + 1):
        if identity_ids(t, ids * n, budget.closure):
            return Order(n, True)
    return Order(cap, False)


# =========================================================
# 4) Action on boundary points
# =========================================================
def act_epw_ids(t: ActionTable, u: Sequence[int], xi: EventuallyPeriodicWord) -> EventuallyPeriodicWord:
    pre = t.letter_ids(xi.preperiod)
    per = t.letter_ids(xi.period)
    out_pre, r = t.act(u, pre)
    r = t.normalize(r)
    seen: Dict[Tuple[int, ...], int] = {r: 0}
    outs: List[Tuple[int, ...]] = []
    while True:
        o, r = t.act(r, per)
        outs.append(o)
        r = t.normalize(r)
        if r in seen:
            break
        seen[r] = len(outs)
    start = seen[r]
    head = list(out_pre)
    for o in outs[:start]:
        head.extend(o)
    loop = [a for o in outs[start:] for a in o]
    return EventuallyPeriodicWord(t.letter_names(head), t.letter_names(loop))


def act_epw(M: MealyAutomaton, u: Sequence[str], xi: EventuallyPeriodicWord) -> EventuallyPeriodicWord:
    t = M.table
    return act_epw_ids(t, t.state_ids(u), xi)


def stabilizes(M: MealyAutomaton, u: Sequence[str], xi: EventuallyPeriodicWord) -> bool:
    return act_epw(M, u, xi) == xi


# =========================================================
# 5) Word enumeration
# =========================================================
def generator_ids(t: ActionTable, *, signed: bool, skip_sink: bool = True) -> List[int]:
    ids = range(len(t.names)) if signed else range(t.n)
    return [i for i in ids if not (skip_sink and i in t.trivial)]


def reduced_words(t: ActionTable, gens: Sequence[int], length: int) -> Iterator[Tuple[int, ...]]:
    """Words of the given length over gens, lexicographic, skipping q q⁻¹ factors."""
    if length == 0:
        yield ()
        return
    gens = sorted(gens)

    def extend(prefix: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == length:
            yield prefix
            return
        for g in gens:
            if prefix and t.signed and t.inv(prefix[-1]) == g:
                continue
            yield from extend(prefix + (g,))

    yield from extend(())


# =========================================================
# 6) Singularity witnesses
# =========================================================
def singular_witness(
    M: MealyAutomaton,
    xi: EventuallyPeriodicWord,
    k_max: Optional[int] = None,
    n_max: Optional[int] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> WitnessReport:
    """Commuting pair (u, v^n) with π(u) ≠ id on the periodic tail v^ω of xi."""
    k_max = budget.kmax if k_max is None else int(k_max)
    n_max = budget.nmax if n_max is None else int(n_max)
    t = M.table
    v = t.letter_ids(xi.period)
    details: Dict[str, Any] = {"point": xi.to_text()}
    if xi.preperiod:
        details["preperiod"] = list(xi.preperiod)
        details["tail"] = xi.tail().to_text()
    gens = generator_ids(t, signed=t.signed)
    exhausted = False
    for size in range(2, k_max + n_max + 1):
        for k in range(1, min(k_max, size - 1) + 1):
            n = size - k
            if n > n_max:
                continue
            vn = v * n
            for u in reduced_words(t, gens, k):
                out, res = t.act(u, vn)
                if out != vn or res != u:
                    continue
                try:
                    trivial = identity_ids(t, u, budget.closure)
                except BudgetExhausted:
                    exhausted = True
                    continue
                if trivial:
                    continue
                word = t.state_names(u)
                logger.info("singular witness u=%s n=%d for %s", word, n, xi)
                return WitnessReport(True, word, n, t.letter_names(vn), exhausted, details)
    return WitnessReport(False, budget_exhausted=exhausted, details=details)


# =========================================================
# 7) Positive relations
# =========================================================
def _positive_ids(t: ActionTable, u: Sequence[str]) -> Tuple[int, ...]:
    ids = t.state_ids(u)
    if any(i >= t.n for i in ids):
        raise PreconditionError(f"word {' '.join(u)!r} is not positive")
    return ids


def positive_relation_search(
    M: MealyAutomaton, len_max: int, budget: Budget = DEFAULT_BUDGET
) -> WitnessReport:
    t = M.table
    gens = generator_ids(t, signed=False)
    exhausted = False
    for k in range(1, int(len_max) + 1):
        for u in itertools.product(gens, repeat=k):
            try:
                if identity_ids(t, u, budget.closure):
                    return WitnessReport(True, t.state_names(u), budget_exhausted=exhausted)
            except BudgetExhausted:
                exhausted = True
    return WitnessReport(False, budget_exhausted=exhausted)


def positive_completion(
    M: MealyAutomaton, u: Sequence[str], len_max: int, budget: Budget = DEFAULT_BUDGET
) -> WitnessReport:
    """Positive v with π(uv) = id; the witness is v."""
    t = M.table
    uid = _positive_ids(t, u)
    gens = generator_ids(t, signed=False)
    exhausted = False
    details = {"u": list(u)}
    for k in range(0, int(len_max) + 1):
        for v in itertools.product(gens, repeat=k):
            try:
                if identity_ids(t, uid + v, budget.closure):
                    return WitnessReport(True, t.state_names(v), budget_exhausted=exhausted, details=details)
            except BudgetExhausted:
                exhausted = True
    return WitnessReport(False, budget_exhausted=exhausted, details=details)


@dataclass(frozen=True)
class FullyPositiveReport:
    holds: bool
    completions: Dict[str, Optional[StateWord]]
    len_max: int
    budget_exhausted: bool = False

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict[str, Any]:
        return {
            "fully_positive": self.holds,
            "len_max": self.len_max,
            "completions": {q: (None if w is None else list(w)) for q, w in self.completions.items()},
            "budget_exhausted": self.budget_exhausted,
        }


def fully_positive(M: MealyAutomaton, len_max: int, budget: Budget = DEFAULT_BUDGET) -> FullyPositiveReport:
    """Every generator inverse equals a positive word (within len_max)."""
    ensure_invertible(M)
    completions: Dict[str, Optional[StateWord]] = {}
    exhausted = False
    for q in M.states:
        if q == M.sink:
            continue
        rep = positive_completion(M, (q,), len_max, budget)
        completions[q] = rep.witness if rep.found else None
        exhausted = exhausted or rep.budget_exhausted
    holds = all(w is not None for w in completions.values())
    return FullyPositiveReport(holds, completions, int(len_max), exhausted)


@dataclass(frozen=True)
class TSReport:
    verdict: str                      # consistent | undetermined
    stabilizer: WitnessReport
    dual_order: Order

    def to_json(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "stabilizer": self.stabilizer.to_json(),
            "dual_order": self.dual_order.to_json(),
        }


def ts_condition(
    M: MealyAutomaton,
    u: Sequence[str],
    k_max: Optional[int] = None,
    l_max: Optional[int] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> TSReport:
    """Nontrivial positive stabilizer of u^ω against torsion of u in the dual group."""
    ensure_reversible(M)
    k_max = budget.kmax if k_max is None else int(k_max)
    l_max = budget.cap if l_max is None else int(l_max)
    t = M.table
    xi = EventuallyPeriodicWord.periodic(u)
    found: Optional[WitnessReport] = None
    exhausted = False
    for k in range(1, k_max + 1):
        for g in itertools.product(generator_ids(t, signed=False), repeat=k):
            if act_epw_ids(t, g, xi) != xi:
                continue
            try:
                if identity_ids(t, g, budget.closure):
                    continue
            except BudgetExhausted:
                exhausted = True
                continue
            found = WitnessReport(True, t.state_names(g), budget_exhausted=exhausted)
            break
        if found:
            break
    stab = found or WitnessReport(False, budget_exhausted=exhausted)
    dual_order = order(dual(M), tuple(u), l_max, budget)
    agree = stab.found == dual_order.exact
    verdict = "consistent" if agree and not stab.budget_exhausted else "undetermined"
    return TSReport(verdict, stab, dual_order)


# =========================================================
# 8) λ / ψ over orbital balls
# =========================================================
def lambda_value(t: ActionTable, q: int, eta: EventuallyPeriodicWord) -> Optional[int]:
    """min{m : q·η[:m] trivial}, None for ∞."""
    pre = t.letter_ids(eta.preperiod)
    per = t.letter_ids(eta.period)
    d = t.d
    s = q
    m = 0
    if s in t.trivial:
        return 0
    for a in pre:
        s = d[s][a]
        m += 1
        if s in t.trivial:
            return m
    seen = set()
    pos = 0
    while (s, pos) not in seen:
        seen.add((s, pos))
        s = d[s][per[pos]]
        m += 1
        pos = (pos + 1) % len(per)
        if s in t.trivial:
            return m
    return None


@dataclass(frozen=True)
class LambdaPsi:
    edges: Tuple[Tuple[str, str, str, Optional[int]], ...]
    psi: Optional[int]
    radius: int
    truncated: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "radius": self.radius,
            "psi": self.psi,
            "truncated": self.truncated,
            "edges": [
                {"source": s, "label": q, "target": d, "lambda": lam if lam is not None else "inf"}
                for s, q, d, lam in self.edges
            ],
        }


def edge_lambda_psi(
    M: MealyAutomaton,
    xi: EventuallyPeriodicWord,
    n: int,
    budget: Budget = DEFAULT_BUDGET,
) -> LambdaPsi:
    from .orbits import orbit_epw

    ensure_sa(M, "edge_lambda_psi")
    t = M.table
    ball = orbit_epw(M, xi, budget.nodes, radius=int(n), labels="positive")
    rows = []
    for src, label, dst in ball.edges():
        lam = lambda_value(t, t.index[label], src)
        rows.append((src.to_text(), label, dst.to_text(), lam))
    finite = [lam for *_, lam in rows if lam is not None]
    psi = max(finite) if finite else None
    return LambdaPsi(tuple(rows), psi, int(n), ball.truncated)
