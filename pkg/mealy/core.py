# mealy/core.py
# -----------------------------------------------------------------------------
# PURPOSE: Mealy automata: representation, .mealy/JSON I/O, classification,
#          structural transforms (dual, inverse, enrich, union, minimize) and
#          the cross-diagram action engine every other module runs on.
# CONTRACT:
#   - MealyAutomaton is immutable; states/letters are tokens, indices follow
#     file order.
#   - State words are stored left to right; the rightmost state acts first
#     (hg∘a = h∘(g∘a)). Residual words keep the stored order.
#   - Inverse states are spelled "q^-1". Signed words are evaluated through
#     the table of enrich(M), never by on-the-fly inversion.
# -----------------------------------------------------------------------------
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import (
    DuplicateTransitionError,
    IncompleteError,
    NotInvertibleError,
    ParseError,
    SinkMismatchError,
    UnknownSymbolError,
)
from .preflight import ensure_invertible, ensure_sink

logger = logging.getLogger(__name__)

INV = "^-1"

StateWord = Tuple[str, ...]
LetterWord = Tuple[str, ...]


# =========================================================
# 1) Signed states / words
# =========================================================
@dataclass(frozen=True)
class SignedState:
    base: str
    sign: int = 1  # +1 or -1

    @classmethod
    def parse(cls, token: str) -> "SignedState":
        if token.endswith(INV):
            return cls(token[: -len(INV)], -1)
        return cls(token, 1)

    def __str__(self) -> str:
        return self.base if self.sign > 0 else self.base + INV


def inv_name(token: str) -> str:
    return token[: -len(INV)] if token.endswith(INV) else token + INV


def is_inverse(token: str) -> bool:
    return token.endswith(INV)


def free_reduce(word: Sequence[str]) -> StateWord:
    out: List[str] = []
    for t in word:
        if out and out[-1] == inv_name(t):
            out.pop()
        else:
            out.append(t)
    return tuple(out)


def is_reduced(word: Sequence[str]) -> bool:
    return all(word[i + 1] != inv_name(word[i]) for i in range(len(word) - 1))


def word_inverse(word: Sequence[str]) -> StateWord:
    return tuple(inv_name(t) for t in reversed(word))


# =========================================================
# 2) Action table (index space of Q or Q ⊔ Q⁻¹)
# =========================================================
@dataclass(frozen=True, eq=False)
class ActionTable:
    """Dense delta/rho over Q (or Q̃ = Q ⊔ Q⁻¹ when the automaton is invertible)."""

    names: Tuple[str, ...]
    letters: Tuple[str, ...]
    delta: np.ndarray
    rho: np.ndarray
    n: int                      # |Q|; indices >= n are inverses
    signed: bool
    trivial: FrozenSet[int]     # sink and its inverse

    @cached_property
    def index(self) -> Dict[str, int]:
        return {s: i for i, s in enumerate(self.names)}

    @cached_property
    def letter_index(self) -> Dict[str, int]:
        return {a: i for i, a in enumerate(self.letters)}

    @cached_property
    def d(self) -> List[List[int]]:
        return self.delta.tolist()

    @cached_property
    def r(self) -> List[List[int]]:
        return self.rho.tolist()

    def inv(self, i: int) -> int:
        if not self.signed:
            raise NotInvertibleError(self.names[i])
        return i + self.n if i < self.n else i - self.n

    def state_ids(self, word: Sequence[str]) -> Tuple[int, ...]:
        out = []
        for t in word:
            if t not in self.index:
                if is_inverse(t) and t[: -len(INV)] in self.index:
                    raise NotInvertibleError(t[: -len(INV)])
                raise UnknownSymbolError("state", t)
            out.append(self.index[t])
        return tuple(out)

    def letter_ids(self, word: Sequence[str]) -> Tuple[int, ...]:
        out = []
        for a in word:
            if a not in self.letter_index:
                raise UnknownSymbolError("letter", a)
            out.append(self.letter_index[a])
        return tuple(out)

    def state_names(self, ids: Iterable[int]) -> StateWord:
        return tuple(self.names[i] for i in ids)

    def letter_names(self, ids: Iterable[int]) -> LetterWord:
        return tuple(self.letters[i] for i in ids)

    def act(self, u: Sequence[int], v: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        d, r = self.d, self.r
        word = list(v)
        residual = list(u)
        for j in range(len(u) - 1, -1, -1):
            s = u[j]
            out = []
            for a in word:
                out.append(r[s][a])
                s = d[s][a]
            word = out
            residual[j] = s
        return tuple(word), tuple(residual)

    def section(self, u: Sequence[int], a: int) -> Tuple[int, Tuple[int, ...]]:
        out, res = self.act(u, (a,))
        return out[0], res

    def normalize(self, u: Sequence[int]) -> Tuple[int, ...]:
        """Free reduction plus removal of sink letters; the action is unchanged."""
        out: List[int] = []
        for i in u:
            if i in self.trivial:
                continue
            if out and self.signed and out[-1] == self.inv(i):
                out.pop()
            else:
                out.append(i)
        return tuple(out)


# =========================================================
# 3) Mealy automaton
# =========================================================
@dataclass(frozen=True)
class MealyAutomaton:
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    delta: Tuple[Tuple[int, ...], ...]   # delta[q][a] = index of q·a
    rho: Tuple[Tuple[int, ...], ...]     # rho[q][a] = index of q∘a
    sink: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.states or not self.alphabet:
            raise ParseError("states and alphabet must be nonempty")
        if len(set(self.states)) != len(self.states) or len(set(self.alphabet)) != len(self.alphabet):
            raise ParseError("duplicate identifiers in states or alphabet")
        clash = set(self.states) & set(self.alphabet)
        if clash:
            raise ParseError(f"identifiers used as both state and letter: {sorted(clash)}")
        nq, nx_ = len(self.states), len(self.alphabet)
        if len(self.delta) != nq or len(self.rho) != nq:
            raise IncompleteError([(q, "*") for q in self.states[min(len(self.delta), len(self.rho)):]])
        missing = [
            (self.states[q], self.alphabet[a])
            for q in range(nq)
            for a in range(nx_)
            if a >= len(self.delta[q]) or a >= len(self.rho[q])
            or not 0 <= self.delta[q][a] < nq or not 0 <= self.rho[q][a] < nx_
        ]
        if missing:
            raise IncompleteError(missing)
        if self.sink is not None:
            if self.sink not in self.states:
                raise UnknownSymbolError("state", self.sink)
            e = self.states.index(self.sink)
            if not _fixes_everything(self.delta, self.rho, e):
                raise SinkMismatchError(self.sink)

    # ---- sizes / lookups ----
    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_letters(self) -> int:
        return len(self.alphabet)

    @cached_property
    def state_index(self) -> Dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def letter_index(self) -> Dict[str, int]:
        return {a: i for i, a in enumerate(self.alphabet)}

    @property
    def sink_id(self) -> Optional[int]:
        return None if self.sink is None else self.state_index[self.sink]

    @cached_property
    def delta_array(self) -> np.ndarray:
        return np.asarray(self.delta, dtype=np.int64).reshape(self.n_states, self.n_letters)

    @cached_property
    def rho_array(self) -> np.ndarray:
        return np.asarray(self.rho, dtype=np.int64).reshape(self.n_states, self.n_letters)

    @cached_property
    def is_invertible(self) -> bool:
        want = np.arange(self.n_letters)
        return all(np.array_equal(np.sort(row), want) for row in self.rho_array)

    @cached_property
    def table(self) -> ActionTable:
        """Action table over Q̃ when invertible, over Q otherwise."""
        d, r = self.delta_array, self.rho_array
        n = self.n_states
        trivial = set()
        if self.sink is not None:
            trivial.add(self.sink_id)
        if not self.is_invertible:
            return ActionTable(self.states, self.alphabet, d, r, n, False, frozenset(trivial))
        r_inv = np.argsort(r, axis=1)            # r_inv[q][b] = a with rho[q][a] = b
        d_inv = np.take_along_axis(d, r_inv, axis=1) + n
        names = self.states + tuple(s + INV for s in self.states)
        if self.sink is not None:
            trivial.add(self.sink_id + n)
        return ActionTable(
            names,
            self.alphabet,
            np.vstack([d, d_inv]),
            np.vstack([r, r_inv]),
            n,
            True,
            frozenset(trivial),
        )

    def transitions(self) -> List[Tuple[str, str, str, str]]:
        return [
            (q, a, self.states[self.delta[i][j]], self.alphabet[self.rho[i][j]])
            for i, q in enumerate(self.states)
            for j, a in enumerate(self.alphabet)
        ]

    def step(self, q: str, a: str) -> Tuple[str, str]:
        """(q·a, q∘a) for single tokens."""
        i = self.state_index.get(q)
        j = self.letter_index.get(a)
        if i is None:
            raise UnknownSymbolError("state", q)
        if j is None:
            raise UnknownSymbolError("letter", a)
        return self.states[self.delta[i][j]], self.alphabet[self.rho[i][j]]

    # ---- serialisation ----
    def to_text(self) -> str:
        lines = [
            "states: " + " ".join(self.states),
            "alphabet: " + " ".join(self.alphabet),
        ]
        if self.sink is not None:
            lines.append(f"sink: {self.sink}")
        lines += [f"{q} {a} -> {p} {b}" for q, a, p, b in self.transitions()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> Dict[str, Any]:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "sink": self.sink,
            "transitions": [list(t) for t in self.transitions()],
        }


def _fixes_everything(delta: Sequence[Sequence[int]], rho: Sequence[Sequence[int]], q: int) -> bool:
    return all(delta[q][a] == q and rho[q][a] == a for a in range(len(rho[q])))


def detect_sink(
    states: Sequence[str], delta: Sequence[Sequence[int]], rho: Sequence[Sequence[int]]
) -> Optional[str]:
    """First state (file order) that self-loops on every letter and fixes it."""
    for q in range(len(states)):
        if _fixes_everything(delta, rho, q):
            return states[q]
    return None


def build_automaton(
    states: Sequence[str],
    alphabet: Sequence[str],
    edges: Dict[Tuple[str, str], Tuple[str, str]],
    *,
    sink: Optional[str] = None,
    auto_sink: bool = True,
) -> MealyAutomaton:
    """Assemble from a (q, a) -> (p, b) map; missing pairs raise IncompleteError."""
    states = tuple(states)
    alphabet = tuple(alphabet)
    si = {s: i for i, s in enumerate(states)}
    li = {a: i for i, a in enumerate(alphabet)}
    missing = [(q, a) for q in states for a in alphabet if (q, a) not in edges]
    if missing:
        raise IncompleteError(missing)
    delta = tuple(tuple(si[edges[(q, a)][0]] for a in alphabet) for q in states)
    rho = tuple(tuple(li[edges[(q, a)][1]] for a in alphabet) for q in states)
    if sink is None and auto_sink:
        sink = detect_sink(states, delta, rho)
    return MealyAutomaton(states, alphabet, delta, rho, sink)


# =========================================================
# 4) .mealy text format / JSON mirror
# =========================================================
_HEADER = re.compile(r"^(states|alphabet|sink|partial)\s*:\s*(.*)$")
_TRANSITION = re.compile(r"^(\S+)\s+(\S+)\s*->\s*(\S+)\s+(\S+)$")
_BAD_TOKEN = re.compile(r"[\^#|>]")


def _check_tokens(tokens: Sequence[str], kind: str, line: int, source: str) -> None:
    for t in tokens:
        if _BAD_TOKEN.search(t):
            raise ParseError(f"invalid {kind} identifier {t!r}", line=line, source=source)


def parse_automaton(text: str, *, source: str = "") -> MealyAutomaton:
    """Parse the `.mealy` format (see README). Sink is auto-detected unless declared."""
    states: Optional[Tuple[str, ...]] = None
    alphabet: Optional[Tuple[str, ...]] = None
    sink: Optional[str] = None
    sink_line = 0
    edges: Dict[Tuple[str, str], Tuple[str, str]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            key, value = m.group(1), m.group(2).split()
            if key == "states":
                if states is not None:
                    raise ParseError("states declared twice", line=lineno, source=source)
                _check_tokens(value, "state", lineno, source)
                states = tuple(value)
            elif key == "alphabet":
                if alphabet is not None:
                    raise ParseError("alphabet declared twice", line=lineno, source=source)
                _check_tokens(value, "letter", lineno, source)
                alphabet = tuple(value)
            elif key == "sink":
                if len(value) != 1:
                    raise ParseError("sink takes exactly one state", line=lineno, source=source)
                sink, sink_line = value[0], lineno
            else:
                if value and value[0].lower() == "true":
                    raise ParseError(
                        "partial automata are an export dialect; a complete automaton is required",
                        line=lineno,
                        source=source,
                    )
            continue
        m = _TRANSITION.match(line)
        if not m:
            raise ParseError(f"cannot read {line!r}", line=lineno, source=source)
        if states is None or alphabet is None:
            raise ParseError("transition before states/alphabet headers", line=lineno, source=source)
        q, a, p, b = m.groups()
        for tok, pool, kind in ((q, states, "state"), (a, alphabet, "letter"),
                                (p, states, "state"), (b, alphabet, "letter")):
            if tok not in pool:
                raise ParseError(f"unknown {kind} {tok!r}", line=lineno, source=source)
        if (q, a) in edges:
            raise DuplicateTransitionError(q, a, line=lineno)
        edges[(q, a)] = (p, b)

    if states is None or alphabet is None:
        raise ParseError("missing states/alphabet header", source=source)
    if sink is not None and sink not in states:
        raise ParseError(f"unknown sink {sink!r}", line=sink_line, source=source)
    return build_automaton(states, alphabet, edges, sink=sink)


def from_json(doc: Dict[str, Any]) -> MealyAutomaton:
    try:
        states = [str(s) for s in doc["states"]]
        alphabet = [str(a) for a in doc["alphabet"]]
        rows = doc["transitions"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"JSON automaton needs states/alphabet/transitions ({exc})") from exc
    edges: Dict[Tuple[str, str], Tuple[str, str]] = {}
    for row in rows:
        if len(row) != 4:
            raise ParseError(f"transition {row!r} is not [q, a, p, b]")
        q, a, p, b = (str(x) for x in row)
        if q not in states or p not in states:
            raise ParseError(f"unknown state in {row!r}")
        if a not in alphabet or b not in alphabet:
            raise ParseError(f"unknown letter in {row!r}")
        if (q, a) in edges:
            raise DuplicateTransitionError(q, a)
        edges[(q, a)] = (p, b)
    sink = doc.get("sink")
    return build_automaton(states, alphabet, edges, sink=None if sink is None else str(sink))


def load_automaton(path: str) -> MealyAutomaton:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        try:
            return from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, source=path) from exc
    return parse_automaton(text, source=path)


_SEP = re.compile(r"[\s,.]+")


def parse_state_word(M: MealyAutomaton, text: str) -> StateWord:
    """Tokens separated by whitespace, commas or dots; `q^-1` is an inverse."""
    tokens = tuple(t for t in _SEP.split(text.strip()) if t)
    for t in tokens:
        s = SignedState.parse(t)
        if s.base not in M.state_index:
            raise UnknownSymbolError("state", t)
        if s.sign < 0 and not M.is_invertible:
            raise NotInvertibleError(s.base)
    return tokens


def parse_letter_word(M: MealyAutomaton, text: str) -> LetterWord:
    """Letters split on separators; with single-character letters a bare string splits per char."""
    text = text.strip()
    if not text:
        return ()
    if _SEP.search(text):
        tokens = tuple(t for t in _SEP.split(text) if t)
    elif text in M.letter_index:
        tokens = (text,)
    elif all(len(a) == 1 for a in M.alphabet):
        tokens = tuple(text)
    else:
        raise UnknownSymbolError("letter", text)
    for a in tokens:
        if a not in M.letter_index:
            raise UnknownSymbolError("letter", a)
    return tokens


# =========================================================
# 5) Classification
# =========================================================
@dataclass(frozen=True)
class ClassReport:
    invertible: bool
    reversible: bool
    coreversible: bool
    bireversible: bool
    has_sink: bool
    sink_accessible: bool
    components: Tuple[Tuple[Tuple[str, ...], bool], ...] = field(default_factory=tuple)

    @property
    def in_sa(self) -> bool:
        return self.invertible and self.sink_accessible

    @property
    def guarantees_singular(self) -> bool:
        # invertible + reversible without bireversibility forces singular points
        return self.invertible and self.reversible and not self.bireversible

    def to_json(self) -> Dict[str, Any]:
        return {
            "invertible": self.invertible,
            "reversible": self.reversible,
            "coreversible": self.coreversible,
            "bireversible": self.bireversible,
            "has_sink": self.has_sink,
            "sink_accessible": self.sink_accessible,
            "in_sa": self.in_sa,
            "guarantees_singular": self.guarantees_singular,
            "components": [{"states": list(s), "bireversible": b} for s, b in self.components],
        }


def _flags(d: np.ndarray, r: np.ndarray, rows: Sequence[int]) -> Tuple[bool, bool, bool]:
    rows = list(rows)
    pos = {q: i for i, q in enumerate(rows)}
    sub_d = d[rows]
    sub_r = r[rows]
    nl = d.shape[1]
    invertible = all(len(set(row)) == nl for row in sub_r.tolist())
    reversible = all(len(set(col)) == len(rows) for col in sub_d.T.tolist())
    produced = {(pos.get(p, -1), b) for p, b in zip(sub_d.ravel().tolist(), sub_r.ravel().tolist())}
    coreversible = len(produced) == len(rows) * nl
    return invertible, reversible, coreversible


def transition_digraph(M: MealyAutomaton) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(range(M.n_states))
    for q in range(M.n_states):
        for a in range(M.n_letters):
            G.add_edge(q, M.delta[q][a])
    return G


def classify(M: MealyAutomaton) -> ClassReport:
    d, r = M.delta_array, M.rho_array
    inv, rev, corev = _flags(d, r, range(M.n_states))
    G = transition_digraph(M)
    comps = []
    for comp in sorted(nx.weakly_connected_components(G), key=min):
        rows = sorted(comp)
        ci, cr, cc = _flags(d, r, rows)
        comps.append((tuple(M.states[q] for q in rows), ci and cr and cc))
    has_sink = M.sink is not None
    accessible = has_sink and len(nx.ancestors(G, M.sink_id)) == M.n_states - 1
    report = ClassReport(inv, rev, corev, inv and rev and corev, has_sink, accessible, tuple(comps))
    logger.debug("classify %s -> %s", M.states, report)
    return report


# =========================================================
# 6) Structural transforms
# =========================================================
def dual(M: MealyAutomaton) -> MealyAutomaton:
    """Swap roles: a —q|p→ b whenever q —a|b→ p."""
    delta = tuple(tuple(M.rho[q][a] for q in range(M.n_states)) for a in range(M.n_letters))
    rho = tuple(tuple(M.delta[q][a] for q in range(M.n_states)) for a in range(M.n_letters))
    sink = detect_sink(M.alphabet, delta, rho)
    return MealyAutomaton(M.alphabet, M.states, delta, rho, sink)


def inverse(M: MealyAutomaton) -> MealyAutomaton:
    """q⁻¹ —b|a→ p⁻¹ whenever q —a|b→ p; names toggle the `^-1` suffix."""
    ensure_invertible(M)
    t = M.table
    n = M.n_states
    delta = tuple(tuple(int(x) - n for x in row) for row in t.delta[n:])
    rho = tuple(tuple(int(x) for x in row) for row in t.rho[n:])
    states = tuple(inv_name(s) for s in M.states)
    sink = None if M.sink is None else inv_name(M.sink)
    return MealyAutomaton(states, M.alphabet, delta, rho, sink)


def enrich(M: MealyAutomaton) -> MealyAutomaton:
    """Disjoint union M ⊔ M⁻¹ on Q̃; the sink stays M's sink."""
    ensure_invertible(M)
    t = M.table
    return MealyAutomaton(
        t.names,
        M.alphabet,
        tuple(tuple(int(x) for x in row) for row in t.delta),
        tuple(tuple(int(x) for x in row) for row in t.rho),
        M.sink,
    )


def union_identify_sinks(M: MealyAutomaton) -> MealyAutomaton:
    """M ⊔ M⁻¹ with e and e⁻¹ merged: 2|Q| − 1 states."""
    ensure_sink(M, "union_identify_sinks")
    ensure_invertible(M)
    t = M.table
    e = M.sink_id
    e_inv = e + M.n_states
    keep = [i for i in range(len(t.names)) if i != e_inv]
    pos = {old: new for new, old in enumerate(keep)}
    pos[e_inv] = pos[e]
    delta = tuple(tuple(pos[int(x)] for x in t.delta[i]) for i in keep)
    rho = tuple(tuple(int(x) for x in t.rho[i]) for i in keep)
    return MealyAutomaton(tuple(t.names[i] for i in keep), M.alphabet, delta, rho, M.sink)


def _first_occurrence(labels: np.ndarray) -> np.ndarray:
    _, first, inverse_ = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inverse_.reshape(-1)]


def refine_partition(delta: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Moore refinement on (output row, successor blocks); -1 marks a missing transition.

    Block ids are numbered by first occurrence.
    """
    delta = np.asarray(delta, dtype=np.int64)
    rho = np.asarray(rho, dtype=np.int64)
    if delta.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    _, inv0 = np.unique(rho, axis=0, return_inverse=True)
    blocks = _first_occurrence(inv0.reshape(-1))
    while True:
        succ = np.where(delta >= 0, blocks[np.clip(delta, 0, None)], -1)
        sig = np.concatenate([blocks[:, None], rho, succ], axis=1)
        _, inv = np.unique(sig, axis=0, return_inverse=True)
        refined = _first_occurrence(inv.reshape(-1))
        if refined.max() == blocks.max():
            return refined
        blocks = refined


def minimize(M: MealyAutomaton) -> MealyAutomaton:
    blocks = refine_partition(M.delta_array, M.rho_array).tolist()
    k = max(blocks) + 1
    reps = [blocks.index(c) for c in range(k)]
    names = [M.states[r] for r in reps]
    if M.sink is not None:
        names[blocks[M.sink_id]] = M.sink
    delta = tuple(tuple(blocks[M.delta[r][a]] for a in range(M.n_letters)) for r in reps)
    rho = tuple(tuple(M.rho[r]) for r in reps)
    if k < M.n_states:
        logger.info("minimize: %d -> %d states", M.n_states, k)
    return MealyAutomaton(tuple(names), M.alphabet, delta, rho, M.sink)


# =========================================================
# 7) Action
# =========================================================
def act(M: MealyAutomaton, u: Sequence[str], v: Sequence[str]) -> Tuple[LetterWord, StateWord]:
    """(u∘v, u·v) via the cross-diagram; signed u goes through enrich(M)."""
    t = M.table
    out, res = t.act(t.state_ids(u), t.letter_ids(v))
    return t.letter_names(out), t.state_names(res)
