# mealy/helix.py
# -----------------------------------------------------------------------------
# PURPOSE: Helix graphs H_{k,n} (state words of length k, letter words of
#          length n), their cycles, commuting pairs, bounded commuting-pair
#          searches and the singular-shape predicates.
# CONTRACT:
#   - H_{k,n} is a functional graph: succ(u, v) = (u·v, u∘v). On partial
#     transducers a missing transition prunes the node (succ = -1).
#   - Node index = code(u) * |X|^n + code(v), both codes lexicographic, so the
#     least index is the lexicographically least node.
# -----------------------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .config import DEFAULT_BUDGET, Budget
from .core import INV, LetterWord, MealyAutomaton, StateWord, classify, free_reduce, inv_name, is_reduced
from .errors import BudgetExhausted, InternalError, PreconditionError
from .group import WitnessReport, identity_ids
from .preflight import ensure_invertible, ensure_reversible, ensure_sa, ensure_within

logger = logging.getLogger(__name__)

SHAPE_MODES = ("singular", "strongly_singular", "essentially_singular")


# =========================================================
# 1) Successor arrays
# =========================================================
def helix_successors(delta: np.ndarray, rho: np.ndarray, k: int, n: int) -> np.ndarray:
    """Successor index of every node of H_{k,n}; -1 where a transition is missing."""
    n_states, n_letters = delta.shape
    size = n_states ** k * n_letters ** n
    codes = np.arange(size, dtype=np.int64)
    v_code = codes % (n_letters ** n)
    u_code = codes // (n_letters ** n)
    U = np.empty((size, k), dtype=np.int64)
    V = np.empty((size, n), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        U[:, j] = u_code % n_states
        u_code //= n_states
    for i in range(n - 1, -1, -1):
        V[:, i] = v_code % n_letters
        v_code //= n_letters
    alive = np.ones(size, dtype=bool)
    for j in range(k - 1, -1, -1):
        s = U[:, j]
        for i in range(n):
            a = V[:, i]
            ok = alive & (s >= 0) & (a >= 0)
            sc, ac = np.where(ok, s, 0), np.where(ok, a, 0)
            out = np.where(ok, rho[sc, ac], -1)
            s = np.where(ok, delta[sc, ac], -1)
            alive &= ok & (out >= 0) & (s >= 0)
            V[:, i] = out
        U[:, j] = s
    su = np.zeros(size, dtype=np.int64)
    for j in range(k):
        su = su * n_states + np.clip(U[:, j], 0, None)
    sv = np.zeros(size, dtype=np.int64)
    for i in range(n):
        sv = sv * n_letters + np.clip(V[:, i], 0, None)
    succ = su * (n_letters ** n) + sv
    return np.where(alive, succ, -1)


def partial_act(
    d: Sequence[Sequence[int]], r: Sequence[Sequence[int]], u: Sequence[int], v: Sequence[int]
) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    word = list(v)
    residual = list(u)
    for j in range(len(u) - 1, -1, -1):
        s = u[j]
        out = []
        for a in word:
            if s < 0 or d[s][a] < 0:
                return None
            out.append(r[s][a])
            s = d[s][a]
        word = out
        residual[j] = s
    return tuple(word), tuple(residual)


# =========================================================
# 2) Helix graph
# =========================================================
@dataclass(frozen=True)
class CommutingPair:
    u: StateWord
    v: LetterWord

    def to_json(self) -> Dict[str, Any]:
        return {"u": list(self.u), "v": list(self.v)}


@dataclass(frozen=True, eq=False)
class HelixGraph:
    k: int
    n: int
    signed: bool
    letters_signed: bool
    state_names: Tuple[str, ...]
    letter_names: Tuple[str, ...]
    delta: np.ndarray
    rho: np.ndarray
    succ: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.succ.shape[0])

    def node(self, index: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        nl, ns = len(self.letter_names), len(self.state_names)
        u_code, v_code = divmod(int(index), nl ** self.n)
        v = []
        for _ in range(self.n):
            v_code, a = divmod(v_code, nl)
            v.append(a)
        u = []
        for _ in range(self.k):
            u_code, s = divmod(u_code, ns)
            u.append(s)
        return tuple(reversed(u)), tuple(reversed(v))

    def index(self, u: Sequence[str], v: Sequence[str]) -> int:
        si = {s: i for i, s in enumerate(self.state_names)}
        li = {a: i for i, a in enumerate(self.letter_names)}
        code = 0
        for s in u:
            code = code * len(self.state_names) + si[s]
        for a in v:
            code = code * len(self.letter_names) + li[a]
        return code

    def names(self, index: int) -> Tuple[StateWord, LetterWord]:
        u, v = self.node(index)
        return tuple(self.state_names[s] for s in u), tuple(self.letter_names[a] for a in v)

    def successor(self, u: Sequence[str], v: Sequence[str]) -> Optional[Tuple[StateWord, LetterWord]]:
        nxt = int(self.succ[self.index(u, v)])
        return None if nxt < 0 else self.names(nxt)

    def cycles(self) -> List[List[int]]:
        """Every cycle once, rotated to start at its least node; ordered by that node."""
        succ = self.succ.tolist()
        stamp = [-1] * len(succ)
        found = []
        for start in range(len(succ)):
            x = start
            while x >= 0 and stamp[x] < 0:
                stamp[x] = start
                x = succ[x]
            if x >= 0 and stamp[x] == start:
                cyc = [x]
                y = succ[x]
                while y != x:
                    cyc.append(y)
                    y = succ[y]
                m = cyc.index(min(cyc))
                found.append(cyc[m:] + cyc[:m])
        return sorted(found, key=lambda c: c[0])

    def to_json(self) -> Dict[str, Any]:
        def fmt(i: int) -> Dict[str, List[str]]:
            u, v = self.names(i)
            return {"u": list(u), "v": list(v)}

        return {
            "k": self.k,
            "n": self.n,
            "signed": self.signed,
            "letters_signed": self.letters_signed,
            "nodes": [
                {**fmt(i), "succ": None if j < 0 else fmt(j)} for i, j in enumerate(self.succ.tolist())
            ],
            "cycles": [[fmt(i) for i in c] for c in self.cycles()],
        }


def helix_from_arrays(
    delta: np.ndarray,
    rho: np.ndarray,
    state_names: Sequence[str],
    letter_names: Sequence[str],
    k: int,
    n: int,
    *,
    signed: bool = False,
    letters_signed: bool = False,
    budget: Budget = DEFAULT_BUDGET,
) -> HelixGraph:
    if k < 1 or n < 1:
        raise PreconditionError(f"helix needs k, n >= 1, got k={k}, n={n}")
    size = len(state_names) ** k * len(letter_names) ** n
    ensure_within(size, budget.nodes, budget="nodes", what=f"helix H_{{{k},{n}}}")
    delta = np.asarray(delta, dtype=np.int64)
    rho = np.asarray(rho, dtype=np.int64)
    succ = helix_successors(delta, rho, k, n)
    return HelixGraph(k, n, signed, letters_signed, tuple(state_names), tuple(letter_names), delta, rho, succ)


def _signed_letters(
    M: MealyAutomaton, delta: np.ndarray, rho: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, Tuple[str, ...]]:
    """Add a⁻¹ columns: p —a⁻¹|b⁻¹→ q whenever q —a|b→ p."""
    S, X = delta.shape
    D = np.full((S, 2 * X), -1, dtype=np.int64)
    R = np.full((S, 2 * X), -1, dtype=np.int64)
    D[:, :X], R[:, :X] = delta, rho
    for q in range(S):
        for a in range(X):
            p, b = int(delta[q, a]), int(rho[q, a])
            if D[p, X + a] >= 0:
                raise PreconditionError("signed letters need a reversible automaton")
            D[p, X + a] = q
            R[p, X + a] = X + b
    return D, R, M.alphabet + tuple(a + INV for a in M.alphabet)


def build_helix(
    M: MealyAutomaton,
    k: int,
    n: int,
    signed: bool = False,
    *,
    letters_signed: bool = False,
    budget: Budget = DEFAULT_BUDGET,
) -> HelixGraph:
    """H_{k,n} over Q (or Q̃ when signed); signed letters extend the action to X̃.

    Signed state words are not free-reduced; see helix_shape.
    """
    if signed:
        ensure_invertible(M)
    t = M.table
    rows = len(t.names) if signed else t.n
    delta, rho = t.delta[:rows], t.rho[:rows]
    letters = M.alphabet
    if letters_signed:
        if signed and not classify(M).bireversible:
            raise PreconditionError("signed states with signed letters need a bireversible automaton")
        ensure_reversible(M)
        delta, rho, letters = _signed_letters(M, delta, rho)
    return helix_from_arrays(
        delta, rho, t.names[:rows], letters, k, n,
        signed=signed, letters_signed=letters_signed, budget=budget,
    )


def cycle_pair_ids(H: HelixGraph, cycle: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """(u_m⋯u_0, v_0⋯v_m) for the cycle (u_0,v_0) → … → (u_m,v_m)."""
    nodes = [H.node(i) for i in cycle]
    u = tuple(s for uu, _ in reversed(nodes) for s in uu)
    v = tuple(a for _, vv in nodes for a in vv)
    return u, v


def _cycle_pair(H: HelixGraph, cycle: Sequence[int]) -> CommutingPair:
    u, v = cycle_pair_ids(H, cycle)
    return CommutingPair(tuple(H.state_names[s] for s in u), tuple(H.letter_names[a] for a in v))


def cycles_to_pairs(H: HelixGraph) -> List[CommutingPair]:
    d, r = H.delta.tolist(), H.rho.tolist()
    pairs = []
    for cycle in H.cycles():
        u, v = cycle_pair_ids(H, cycle)
        if partial_act(d, r, u, v) != (v, u):
            raise InternalError(f"helix cycle at node {cycle[0]} does not commute")
        pairs.append(_cycle_pair(H, cycle))
    return pairs


# =========================================================
# 3) Bounded commuting-pair searches
# =========================================================
def _sub_arrays(
    delta: np.ndarray, rho: np.ndarray, keep: Sequence[int]
) -> Tuple[np.ndarray, np.ndarray]:
    """Restriction to `keep` (re-indexed); transitions leaving it become -1."""
    pos = np.full(delta.shape[0], -1, dtype=np.int64)
    pos[list(keep)] = np.arange(len(keep))
    sub_d = pos[delta[list(keep)]]
    sub_r = np.where(sub_d >= 0, rho[list(keep)], -1)
    return sub_d, sub_r


def size_order(k_max: int, n_max: int) -> Iterator[Tuple[int, int]]:
    """(k, n) pairs with k <= k_max, n <= n_max by increasing k + n, then k."""
    for total in range(2, k_max + n_max + 1):
        for k in range(1, min(k_max, total - 1) + 1):
            if total - k <= n_max:
                yield k, total - k


def scan_pairs(
    delta: np.ndarray,
    rho: np.ndarray,
    state_names: Sequence[str],
    letter_names: Sequence[str],
    k_max: int,
    n_max: int,
    budget: Budget = DEFAULT_BUDGET,
) -> Iterator[Tuple[int, int, Optional[CommutingPair]]]:
    """Commuting pairs of H_{k,n} by increasing k + n; None marks a helix over the node cap."""
    for k, n in size_order(k_max, n_max):
        try:
            H = helix_from_arrays(delta, rho, state_names, letter_names, k, n, budget=budget)
        except BudgetExhausted:
            yield k, n, None
            continue
        for pair in cycles_to_pairs(H):
            yield k, n, pair


def _search_pairs(
    M: MealyAutomaton,
    keep: Sequence[int],
    k_max: int,
    n_max: int,
    budget: Budget,
    *,
    require_reduced: bool = False,
) -> WitnessReport:
    t = M.table
    sub_d, sub_r = _sub_arrays(t.delta, t.rho, keep)
    names = tuple(t.names[i] for i in keep)
    exhausted = False
    for k, n, pair in scan_pairs(sub_d, sub_r, names, M.alphabet, k_max, n_max, budget):
        if pair is None:
            exhausted = True
            continue
        if require_reduced and not is_reduced(pair.u):
            continue
        uid = t.state_ids(pair.u)
        vid = t.letter_ids(pair.v)
        if t.act(uid, vid) != (vid, uid):
            raise InternalError(f"pair {pair} does not commute in the full automaton")
        details: Dict[str, Any] = {"k": k, "n": n}
        try:
            details["pi_u_trivial"] = identity_ids(t, uid, budget.closure)
        except BudgetExhausted:
            details["pi_u_trivial"] = None
        logger.info("commuting pair %s at k=%d n=%d", pair, k, n)
        return WitnessReport(True, pair.u, None, pair.v, exhausted, details)
    return WitnessReport(False, budget_exhausted=exhausted, details={"k_max": k_max, "n_max": n_max})


def restricted_commuting_pair(
    M: MealyAutomaton,
    allowed_states: Sequence[str],
    k_max: Optional[int] = None,
    n_max: Optional[int] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> WitnessReport:
    """Helix cycles of the sub-automaton on allowed_states (missing transitions prune)."""
    allowed = list(dict.fromkeys(allowed_states))
    if not allowed:
        raise PreconditionError("restricted_commuting_pair needs a nonempty state set")
    keep = sorted(M.table.state_ids(allowed))
    k_max = budget.kmax if k_max is None else int(k_max)
    n_max = budget.nmax if n_max is None else int(n_max)
    return _search_pairs(M, keep, k_max, n_max, budget)


def non_elementary_commuting_pair(
    M: MealyAutomaton,
    k_max: Optional[int] = None,
    n_max: Optional[int] = None,
    signed: bool = False,
    budget: Budget = DEFAULT_BUDGET,
) -> WitnessReport:
    ensure_sa(M, "non_elementary_commuting_pair")
    t = M.table
    k_max = budget.kmax if k_max is None else int(k_max)
    n_max = budget.nmax if n_max is None else int(n_max)
    pool = range(len(t.names)) if signed else range(t.n)
    keep = [i for i in pool if i not in t.trivial]
    if not keep:
        return WitnessReport(False, details={"vacuous": True})
    return _search_pairs(M, keep, k_max, n_max, budget, require_reduced=signed)


# =========================================================
# 4) Elementary relations
# =========================================================
def is_elementary_relation(M: MealyAutomaton, u: Sequence[str], budget: Budget = DEFAULT_BUDGET) -> bool:
    """True iff the section graph of the relation u is acyclic once trivial sections are dropped.

    A section is trivial when it free-reduces to the empty word after sink letters are removed,
    so signed relations such as a a^-1 are handled like positive ones.
    """
    ensure_sa(M, "is_elementary_relation")
    t = M.table
    uid = t.state_ids(u)
    if any(i in t.trivial for i in uid):
        raise PreconditionError("relation words avoid the sink")
    if not identity_ids(t, uid, budget.closure):
        raise PreconditionError(f"{' '.join(u)!r} is not a relation")
    G = nx.DiGraph()
    G.add_node(uid)
    stack = [uid]
    while stack:
        w = stack.pop()
        for a in range(M.n_letters):
            _, res = t.section(w, a)
            if res not in G:
                ensure_within(G.number_of_nodes() + 1, budget.closure, budget="closure", what="section graph")
                stack.append(res)
            G.add_edge(w, res)
    G.remove_nodes_from([w for w in list(G) if not t.normalize(w)])
    return nx.is_directed_acyclic_graph(G)


# =========================================================
# 5) Helix shapes
# =========================================================
@dataclass(frozen=True)
class ShapeVerdict:
    holds: bool
    mode: str
    k: int
    n: int
    offending: Optional[CommutingPair] = None
    budget_exhausted: bool = False
    letters_signed: bool = False

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "k": self.k,
            "n": self.n,
            "holds": self.holds,
            "offending": None if self.offending is None else self.offending.to_json(),
            "budget_exhausted": self.budget_exhausted,
            "letters_signed": self.letters_signed,
        }


def cyclic_reduce(word: Sequence[str]) -> Tuple[str, ...]:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == inv_name(w[-1]):
        w = w[1:-1]
    return tuple(w)


def helix_shape(
    M: MealyAutomaton,
    k: int,
    n: int,
    mode: str = "singular",
    budget: Budget = DEFAULT_BUDGET,
) -> ShapeVerdict:
    """Shape predicate of H_{k,n}.

    singular: every cycle is a self-loop at (e^k, v).
    strongly_singular: every cycle of the signed helix has u over {e, e^-1} or u acting as the
    identity.
    essentially_singular: the same, read as an implication: cycles whose letter word cyclically
    reduces to the empty word are skipped, since v^ω is then not essentially non-trivial.

    Signed nodes range over all of Q̃^k, not only reduced words: the successor u·v of a reduced
    word need not be reduced, so a reduced-only node set would lose out-degree one. Cycles
    through non-reduced words are harmless here because their state words are tested as group
    elements, and a word like a a^-1 passes the identity test.
    """
    if mode not in SHAPE_MODES:
        raise ValueError(f"Unsupported helix shape: {mode!r}")
    e = ensure_sa(M, "helix_shape")
    t = M.table

    if mode == "singular":
        H = build_helix(M, k, n, budget=budget)
        for cycle in H.cycles():
            u, _ = H.node(cycle[0])
            if len(cycle) > 1 or any(s != e for s in u):
                pair = _cycle_pair(H, cycle)
                return ShapeVerdict(False, mode, k, n, pair)
        return ShapeVerdict(True, mode, k, n)

    letters_signed = classify(M).bireversible
    H = build_helix(M, k, n, signed=True, letters_signed=letters_signed, budget=budget)
    exhausted = False
    for cycle in H.cycles():
        if mode == "essentially_singular":
            _, v = cycle_pair_ids(H, cycle)
            if not cyclic_reduce([H.letter_names[a] for a in v]):
                continue
        for node in cycle:
            u, _ = H.node(node)
            if all(s in t.trivial for s in u):
                continue
            try:
                if identity_ids(t, u, budget.closure):
                    continue
            except BudgetExhausted:
                exhausted = True
                continue
            return ShapeVerdict(False, mode, k, n, _cycle_pair(H, cycle), exhausted, letters_signed)
    return ShapeVerdict(not exhausted, mode, k, n, None, exhausted, letters_signed)

