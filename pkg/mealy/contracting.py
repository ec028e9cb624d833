# mealy/contracting.py
# -----------------------------------------------------------------------------
# PURPOSE: Nucleus semi-algorithm, stable (a|a-pruned) Büchi automaton, weak
#          Büchi language description, self-replication check, singular-set
#          description and isolated points.
# CONTRACT:
#   - nucleus() returns Nucleus or NotVerified; caps are never exceeded
#     silently.
#   - Every state of a stable automaton is initial; accepting = all but sink.
#   - The cofinality closure of a language is a flag, never materialised.
# -----------------------------------------------------------------------------
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from .config import DEFAULT_BUDGET, Budget
from .core import INV, ActionTable, MealyAutomaton, minimize, refine_partition
from .errors import BudgetExhausted, UnknownSymbolError
from .group import identity_ids
from .preflight import ensure_invertible, ensure_within

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]


# =========================================================
# 1) Nucleus
# =========================================================
def _token(name: str) -> str:
    return name[: -len(INV)] + "'" if name.endswith(INV) else name


@dataclass(frozen=True)
class NucleusElement:
    word: Tuple[str, ...]          # canonical representative over Q̃
    sections: Tuple[int, ...]      # letter -> element index
    outputs: Tuple[int, ...]       # letter -> letter index


@dataclass(frozen=True)
class Nucleus:
    alphabet: Tuple[str, ...]
    elements: Tuple[NucleusElement, ...]
    sink_index: int
    identity_name: str = "id"

    def __len__(self) -> int:
        return len(self.elements)

    def name(self, i: int) -> str:
        if i == self.sink_index:
            return self.identity_name
        return "_".join(_token(s) for s in self.elements[i].word)

    def names(self) -> List[str]:
        return [self.name(i) for i in range(len(self.elements))]

    def words(self) -> List[Tuple[str, ...]]:
        return [el.word for el in self.elements]

    def to_automaton(self) -> MealyAutomaton:
        return MealyAutomaton(
            tuple(self.names()),
            self.alphabet,
            tuple(el.sections for el in self.elements),
            tuple(el.outputs for el in self.elements),
            self.identity_name,
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "verified": True,
            "size": len(self),
            "elements": [
                {"name": self.name(i), "word": list(el.word)} for i, el in enumerate(self.elements)
            ],
            "automaton": self.to_automaton().to_json(),
        }


@dataclass(frozen=True)
class NotVerified:
    reason: str
    partial: Tuple[Tuple[str, ...], ...] = field(default_factory=tuple)

    def to_json(self) -> Dict[str, Any]:
        return {"verified": False, "reason": self.reason, "partial": [list(w) for w in self.partial]}


def _section_graph(t: ActionTable, root: Word, limit: int) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_node(root)
    queue = deque([root])
    while queue:
        w = queue.popleft()
        for a in range(len(t.letters)):
            _, res = t.section(w, a)
            r = t.normalize(res)
            if r not in G:
                ensure_within(G.number_of_nodes() + 1, limit, budget="closure", what="section graph")
                queue.append(r)
            G.add_edge(w, r)
    return G


def _recurring(G: nx.DiGraph) -> Set[Word]:
    """Nodes on cycles plus everything below them."""
    core: Set[Word] = set()
    for comp in nx.strongly_connected_components(G):
        if len(comp) > 1 or any(G.has_edge(w, w) for w in comp):
            core |= comp
    out = set(core)
    for w in core:
        out |= nx.descendants(G, w)
    return out


def _classes(t: ActionTable, pool: Set[Word], limit: int) -> Tuple[List[Word], np.ndarray]:
    words = sorted(pool, key=lambda w: (len(w), w))
    index = {w: i for i, w in enumerate(words)}
    i = 0
    delta: List[List[int]] = []
    rho: List[List[int]] = []
    while i < len(words):
        w = words[i]
        drow, rrow = [], []
        for a in range(len(t.letters)):
            out, res = t.section(w, a)
            r = t.normalize(res)
            if r not in index:
                index[r] = len(words)
                words.append(r)
                ensure_within(len(words), limit, budget="closure", what="nucleus pool")
            drow.append(index[r])
            rrow.append(out)
        delta.append(drow)
        rho.append(rrow)
        i += 1
    return words, refine_partition(np.asarray(delta, dtype=np.int64), np.asarray(rho, dtype=np.int64))


def nucleus(M: MealyAutomaton, budget: Budget = DEFAULT_BUDGET) -> Union[Nucleus, NotVerified]:
    """Iterate: classes of the pool; add recurring sections of pairwise products."""
    ensure_invertible(M)
    t = M.table
    gens = [i for i in range(len(t.names)) if i not in t.trivial]
    pool: Set[Word] = {()} | {(g,) for g in gens}
    previous = -1
    reps: List[Word] = []
    try:
        while True:
            words, blocks = _classes(t, pool, budget.closure)
            n_classes = int(blocks.max()) + 1
            best: Dict[int, Word] = {}
            for w, b in zip(words, blocks.tolist()):
                if b not in best or (len(w), w) < (len(best[b]), best[b]):
                    best[b] = w
            reps = sorted(best.values(), key=lambda w: (len(w), w))
            logger.info("nucleus round: %d words, %d classes", len(words), n_classes)
            if n_classes > budget.cap:
                return NotVerified(f"size cap {budget.cap} exceeded", tuple(t.state_names(w) for w in reps))
            if max(len(w) for w in reps) > budget.depth:
                return NotVerified(f"depth cap {budget.depth} exceeded", tuple(t.state_names(w) for w in reps))
            if n_classes == previous:
                break
            previous = n_classes
            pool = set(words)
            for g, h in itertools.product(reps, repeat=2):
                prod = t.normalize(g + h)
                pool |= _recurring(_section_graph(t, prod, budget.closure))
    except BudgetExhausted as exc:
        return NotVerified(str(exc), tuple(t.state_names(w) for w in reps))

    # final tables, indexed by the sorted representatives
    cls_of = {w: b for w, b in zip(words, blocks.tolist())}
    rep_index = {cls_of[w]: i for i, w in enumerate(reps)}
    elements = []
    for w in reps:
        sections, outputs = [], []
        for a in range(len(t.letters)):
            out, res = t.section(w, a)
            sections.append(rep_index[cls_of[t.normalize(res)]])
            outputs.append(out)
        elements.append(NucleusElement(t.state_names(w), tuple(sections), tuple(outputs)))
    sink_index = rep_index[cls_of[()]]
    return Nucleus(M.alphabet, tuple(elements), sink_index, M.sink or "id")


# =========================================================
# 2) Stable automaton / weak Büchi language
# =========================================================
@dataclass(frozen=True)
class StableAutomaton:
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    edges: Tuple[Tuple[int, int, int], ...]   # (state, letter, target), kept iff a|a
    sink: Optional[int]
    accepting: Tuple[int, ...]

    def transitions(self) -> List[Tuple[str, str, str]]:
        return [(self.states[s], self.alphabet[a], self.states[p]) for s, a, p in self.edges]

    def to_text(self) -> str:
        lines = [
            "partial: true",
            "states: " + " ".join(self.states),
            "alphabet: " + " ".join(self.alphabet),
        ]
        if self.sink is not None:
            lines.append(f"sink: {self.states[self.sink]}")
        lines.append("accepting: " + " ".join(self.states[q] for q in self.accepting))
        lines += [f"{q} {a} -> {p} {a}" for q, a, p in self.transitions()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> Dict[str, Any]:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "sink": None if self.sink is None else self.states[self.sink],
            "accepting": [self.states[q] for q in self.accepting],
            "transitions": [list(t) for t in self.transitions()],
        }


def _prune(
    names: Sequence[str],
    alphabet: Sequence[str],
    sections: Sequence[Sequence[int]],
    outputs: Sequence[Sequence[int]],
    sink: Optional[int],
    rejecting: Set[int],
) -> StableAutomaton:
    edges = tuple(
        (q, a, sections[q][a])
        for q in range(len(names))
        for a in range(len(alphabet))
        if outputs[q][a] == a
    )
    accepting = tuple(q for q in range(len(names)) if q != sink and q not in rejecting)
    return StableAutomaton(tuple(names), tuple(alphabet), edges, sink, accepting)


def stable_automaton(N: Nucleus) -> StableAutomaton:
    return _prune(
        N.names(),
        N.alphabet,
        [el.sections for el in N.elements],
        [el.outputs for el in N.elements],
        N.sink_index,
        set(),
    )


@dataclass(frozen=True)
class Lasso:
    state: str
    cycle: Tuple[str, ...]

    def to_json(self) -> Dict[str, Any]:
        return {"state": self.state, "cycle": list(self.cycle)}


@dataclass(frozen=True)
class BuchiLanguage:
    lassos: Tuple[Lasso, ...]
    uncountable: bool = False

    @property
    def empty(self) -> bool:
        return not self.lassos

    def to_json(self) -> Dict[str, Any]:
        if self.empty:
            return {"language": "empty"}
        return {
            "language": "lassos",
            "lassos": [l.to_json() for l in self.lassos],
            "uncountable": self.uncountable,
        }


def buchi_language(P: StableAutomaton) -> BuchiLanguage:
    """Elementary cycles inside the accepting states; empty iff there are none."""
    acc = set(P.accepting)
    G = nx.DiGraph()
    G.add_nodes_from(acc)
    labels: Dict[Tuple[int, int], List[int]] = {}
    for q, a, p in P.edges:
        if q in acc and p in acc:
            G.add_edge(q, p)
            labels.setdefault((q, p), []).append(a)
    lassos = set()
    for cyc in nx.simple_cycles(G):
        m = cyc.index(min(cyc))
        cyc = cyc[m:] + cyc[:m]
        hops = list(zip(cyc, cyc[1:] + cyc[:1]))
        for letters in itertools.product(*(labels[h] for h in hops)):
            lassos.add((cyc[0], letters))
    uncountable = False
    for comp in nx.strongly_connected_components(G):
        n_edges = sum(len(labels.get((q, p), ())) for q in comp for p in comp)
        if n_edges > len(comp):
            uncountable = True
    ordered = sorted(lassos)
    return BuchiLanguage(
        tuple(Lasso(P.states[q], tuple(P.alphabet[a] for a in w)) for q, w in ordered),
        uncountable,
    )


# =========================================================
# 3) Self-replication
# =========================================================
@dataclass(frozen=True)
class SelfReplicationVerdict:
    holds: bool
    depth: int
    transitive: bool
    missing: Tuple[Tuple[str, str], ...] = ()    # (letter, generator) without a witness
    budget_exhausted: bool = False

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict[str, Any]:
        return {
            "self_replicating": self.holds,
            "depth": self.depth,
            "level_transitive": self.transitive,
            "missing": [list(m) for m in self.missing],
            "budget_exhausted": self.budget_exhausted,
        }


def _level_transitive(M: MealyAutomaton) -> bool:
    G = nx.Graph()
    G.add_nodes_from(range(M.n_letters))
    for row in M.rho:
        for a, b in enumerate(row):
            G.add_edge(a, b)
    return nx.is_connected(G)


def is_self_replicating(
    M: MealyAutomaton, depth: Optional[int] = None, budget: Budget = DEFAULT_BUDGET
) -> SelfReplicationVerdict:
    """Level-1 transitivity and, for every letter a and generator g, h ∈ St(a) with h·a = g."""
    ensure_invertible(M)
    depth = budget.kmax if depth is None else int(depth)
    t = M.table
    transitive = _level_transitive(M)
    gens = [i for i in range(len(t.names)) if i not in t.trivial]
    targets = [g for g in gens if g < t.n]
    missing = []
    exhausted = False
    for a in range(M.n_letters):
        todo = set(targets)
        frontier: List[Word] = [()]
        for _ in range(depth):
            if not todo:
                break
            nxt = []
            for h in frontier:
                for g in gens:
                    if h and t.inv(h[-1]) == g:
                        continue
                    w = h + (g,)
                    nxt.append(w)
                    out, res = t.section(w, a)
                    if out != a:
                        continue
                    for target in sorted(todo):
                        try:
                            if identity_ids(t, t.normalize(res) + (t.inv(target),), budget.closure):
                                todo.discard(target)
                        except BudgetExhausted:
                            exhausted = True
            frontier = nxt
        missing += [(M.alphabet[a], t.names[g]) for g in sorted(todo)]
    holds = transitive and not missing
    return SelfReplicationVerdict(holds, depth, transitive, tuple(missing), exhausted)


# =========================================================
# 4) Singular set
# =========================================================
@dataclass(frozen=True)
class SingularDescription:
    language: BuchiLanguage
    qualifier: str                     # exact | sandwich | lower_bound
    self_replication: Optional[SelfReplicationVerdict]
    nucleus_size: Optional[int]

    @property
    def exact(self) -> bool:
        return self.qualifier == "exact"

    @property
    def empty(self) -> bool:
        return self.language.empty

    def to_json(self) -> Dict[str, Any]:
        return {
            "lassos": [l.to_json() for l in self.language.lassos],
            "empty": self.empty,
            "exact": self.exact,
            "qualifier": self.qualifier,
            "closure": "cofinal",
            "uncountable": self.language.uncountable,
            "nucleus_size": self.nucleus_size,
            "self_replication": None if self.self_replication is None else self.self_replication.to_json(),
        }


def stable_of_automaton(M: MealyAutomaton, budget: Budget = DEFAULT_BUDGET) -> StableAutomaton:
    """Prune(minimize(M)) with the states acting trivially made non-accepting."""
    m = minimize(M)
    t = m.table
    rejecting = set()
    for q in range(m.n_states):
        try:
            if identity_ids(t, (q,), budget.closure):
                rejecting.add(q)
        except BudgetExhausted:
            pass
    return _prune(m.states, m.alphabet, m.delta, m.rho, m.sink_id, rejecting)


def singular_set(
    M: MealyAutomaton,
    N: Optional[Union[Nucleus, NotVerified]] = None,
    *,
    depth: Optional[int] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> SingularDescription:
    if N is None:
        N = nucleus(M, budget)
    if isinstance(N, NotVerified):
        logger.warning("nucleus not verified (%s); reporting a lower bound", N.reason)
        return SingularDescription(buchi_language(stable_of_automaton(M, budget)), "lower_bound", None, None)
    lang = buchi_language(stable_automaton(N))
    verdict = is_self_replicating(M, depth, budget)
    return SingularDescription(lang, "exact" if verdict.holds else "sandwich", verdict, len(N))


# =========================================================
# 5) Isolated points
# =========================================================
@dataclass(frozen=True)
class IsolatedVerdict:
    holds: bool
    state: str
    word: Tuple[str, ...]
    note: str = ""

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict[str, Any]:
        doc = {"isolated": self.holds, "state": self.state, "word": list(self.word)}
        if self.note:
            doc["note"] = self.note
        return doc


def isolated_point(M: MealyAutomaton, q: str, a: Union[str, Sequence[str]]) -> IsolatedVerdict:
    """q∘w = w, q·w = q and p·w ≠ p for every non-sink p ≠ q (w a letter or a word)."""
    ensure_invertible(M)
    w = (a,) if isinstance(a, str) else tuple(a)
    t = M.table
    if q not in M.state_index:
        raise UnknownSymbolError("state", q)
    qi = M.state_index[q]
    wid = t.letter_ids(w)
    out, res = t.act((qi,), wid)
    if out != wid or res != (qi,):
        return IsolatedVerdict(False, q, w)
    others = [p for p in range(M.n_states) if p != qi and p != M.sink_id]
    if not others:
        return IsolatedVerdict(True, q, w, "vacuous: no other non-sink state")
    holds = all(t.act((p,), wid)[1] != (p,) for p in others)
    return IsolatedVerdict(holds, q, w)
