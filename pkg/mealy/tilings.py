# mealy/tilings.py
# -----------------------------------------------------------------------------
# PURPOSE: Wang tiles of Mealy automata. Tilesets from automata and back,
#          determinism flags, periodic tilings from helix cycles, bounded
#          square / torus searches, reflection closure (kp adjacency),
#          synchronizing words and the MaxSync check.
# CONTRACT:
#   - Tile (w, s, e, n) = (q, a, p, b) for q —a|b→ p. A row of tiles is one
#     state reading a letter word left to right; rows stack bottom to top, so
#     the bottom row of a cross-diagram is the rightmost state of u.
#   - Grids are lists of rows, bottom row first.
#   - kp adjacency forbids a tile next to its mirror image across the shared
#     edge, for the reflection axes the tileset declares.
#   - NoTiling is only reported after an exhaustive search.
# -----------------------------------------------------------------------------
from __future__ import annotations

import itertools
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_BUDGET, Budget
from .core import LetterWord, MealyAutomaton, detect_sink, inv_name, is_reduced
from .errors import (
    BudgetExhausted,
    CompletionError,
    IncompleteError,
    InternalError,
    NoSinkError,
    ParseError,
    PartitionError,
    PreconditionError,
)
from .helix import build_helix, cycle_pair_ids, scan_pairs, size_order
from .preflight import ensure_sa, ensure_within

logger = logging.getLogger(__name__)

TILESET_MODES = ("plain", "kp")
REFLECTION_AXES = {"h": ("h",), "v": ("v",), "both": ("h", "v")}
MAXSYNC_VARIANTS = ("plain", "h", "kp")


# =========================================================
# 1) Tiles and tilesets
# =========================================================
@dataclass(frozen=True)
class WangTile:
    west: str
    south: str
    east: str
    north: str

    def to_json(self) -> Dict[str, str]:
        return {"w": self.west, "s": self.south, "e": self.east, "n": self.north}

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "WangTile":
        return cls(str(doc["w"]), str(doc["s"]), str(doc["e"]), str(doc["n"]))

    def __str__(self) -> str:
        return f"({self.west},{self.south},{self.east},{self.north})"


def reflect_h(t: WangTile) -> WangTile:
    """Mirror along a horizontal line: (w, s, e, n) -> (w⁻¹, n, e⁻¹, s)."""
    return WangTile(inv_name(t.west), t.north, inv_name(t.east), t.south)


def reflect_v(t: WangTile) -> WangTile:
    """Mirror along a vertical line: (w, s, e, n) -> (e, s⁻¹, w, n⁻¹)."""
    return WangTile(t.east, inv_name(t.south), t.west, inv_name(t.north))


@dataclass(frozen=True)
class WangTileset:
    tiles: Tuple[WangTile, ...] = ()
    mode: str = "plain"
    axes: Tuple[str, ...] = ()
    negative: FrozenSet[WangTile] = frozenset()

    def __post_init__(self) -> None:
        if self.mode not in TILESET_MODES:
            raise ValueError(f"Unsupported tileset mode: {self.mode!r}")
        object.__setattr__(self, "tiles", tuple(dict.fromkeys(self.tiles)))

    def __len__(self) -> int:
        return len(self.tiles)

    def __iter__(self):
        return iter(self.tiles)

    @property
    def tile_set(self) -> FrozenSet[WangTile]:
        return frozenset(self.tiles)

    @property
    def state_colors(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys([t.west for t in self.tiles] + [t.east for t in self.tiles]))

    @property
    def letter_colors(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys([t.south for t in self.tiles] + [t.north for t in self.tiles]))

    def excludes(self, axis: str) -> bool:
        return self.mode == "kp" and axis in self.axes

    def to_json(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"mode": self.mode, "tiles": [t.to_json() for t in self.tiles]}
        if self.axes:
            doc["axes"] = list(self.axes)
        if self.negative:
            doc["negative"] = [i for i, t in enumerate(self.tiles) if t in self.negative]
        return doc

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "WangTileset":
        try:
            tiles = tuple(WangTile.from_json(t) for t in doc["tiles"])
            mode = str(doc.get("mode", "plain"))
            axes = tuple(doc.get("axes") or (("h", "v") if mode == "kp" else ()))
            negative = frozenset(tiles[i] for i in doc.get("negative", ()))
        except (KeyError, TypeError, IndexError) as exc:
            raise ParseError(f"bad tileset document: {exc}") from exc
        if mode not in TILESET_MODES:
            raise ParseError(f"unknown tileset mode {mode!r}")
        return cls(tiles, mode, axes, negative)


def load_tileset(path: str) -> WangTileset:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, source=path) from exc
    return WangTileset.from_json(doc)


def tileset_from(
    M: MealyAutomaton, reduced: bool = False, restrict: Optional[Iterable[str]] = None
) -> WangTileset:
    """T(M), or T̄(M) when reduced: tiles whose state colors avoid the sink."""
    allowed = set(M.states)
    if reduced:
        if M.sink is None:
            raise NoSinkError("reduced tileset")
        allowed.discard(M.sink)
    if restrict is not None:
        chosen = set(restrict)
        unknown = chosen - set(M.states)
        if unknown:
            raise PreconditionError(f"unknown states in restriction: {sorted(unknown)}")
        allowed &= chosen
    tiles = tuple(
        WangTile(q, a, p, b) for q, a, p, b in M.transitions() if q in allowed and p in allowed
    )
    return WangTileset(tiles)


# =========================================================
# 2) Determinism and the transducer of a tileset
# =========================================================
@dataclass(frozen=True)
class DeterminismFlags:
    ws: bool
    es: bool
    wn: bool
    en: bool

    @property
    def four_way(self) -> bool:
        return self.ws and self.es and self.wn and self.en

    def to_json(self) -> Dict[str, bool]:
        return {"ws": self.ws, "es": self.es, "wn": self.wn, "en": self.en, "four_way": self.four_way}


def _unique(keys: Sequence[Tuple[str, str]]) -> bool:
    return len(set(keys)) == len(keys)


def determinism(T: WangTileset) -> DeterminismFlags:
    tiles = T.tiles
    return DeterminismFlags(
        ws=_unique([(t.west, t.south) for t in tiles]),
        es=_unique([(t.east, t.south) for t in tiles]),
        wn=_unique([(t.west, t.north) for t in tiles]),
        en=_unique([(t.east, t.north) for t in tiles]),
    )


@dataclass(frozen=True, eq=False)
class PartialTransducer:
    """t_w —t_s|t_n→ t_e; -1 marks a missing transition."""

    states: Tuple[str, ...]
    letters: Tuple[str, ...]
    delta: np.ndarray
    rho: np.ndarray

    def missing(self) -> List[Tuple[str, str]]:
        rows, cols = np.nonzero(self.delta < 0)
        return [(self.states[q], self.letters[a]) for q, a in zip(rows.tolist(), cols.tolist())]


def transducer_of(T: WangTileset) -> PartialTransducer:
    states, letters = T.state_colors, T.letter_colors
    overlap = set(states) & set(letters)
    if overlap:
        raise PartitionError(sorted(overlap))
    if not determinism(T).ws:
        raise PreconditionError("tileset is not ws-deterministic, so it is not a transducer")
    si = {s: i for i, s in enumerate(states)}
    li = {a: i for i, a in enumerate(letters)}
    delta = np.full((len(states), len(letters)), -1, dtype=np.int64)
    rho = np.full((len(states), len(letters)), -1, dtype=np.int64)
    for t in T.tiles:
        delta[si[t.west], li[t.south]] = si[t.east]
        rho[si[t.west], li[t.south]] = li[t.north]
    return PartialTransducer(states, letters, delta, rho)


def _fresh_name(taken: Iterable[str]) -> str:
    taken = set(taken)
    if "e" not in taken:
        return "e"
    return next(f"e{i}" for i in itertools.count() if f"e{i}" not in taken)


def automaton_from_tileset(T: WangTileset, sink_complete: bool = False) -> MealyAutomaton:
    """M(T); with sink_complete, missing transitions go to a fresh sink keeping outputs bijective."""
    if not T.tiles:
        raise PreconditionError("an empty tileset has no automaton")
    P = transducer_of(T)
    delta, rho = P.delta.copy(), P.rho.copy()
    states = P.states
    sink: Optional[str] = None

    if not sink_complete:
        missing = P.missing()
        if missing:
            raise IncompleteError(missing)
    else:
        for q, row in enumerate(rho.tolist()):
            outs = [b for b in row if b >= 0]
            if len(set(outs)) != len(outs):
                raise CompletionError(states[q], "two tiles share west and north colors")
        if not determinism(T).four_way:
            raise PreconditionError("sink completion needs a 4-way deterministic tileset")
        sink = _fresh_name(P.states + P.letters)
        e = len(states)
        n_letters = len(P.letters)
        for q in range(e):
            free_in = [a for a in range(n_letters) if delta[q, a] < 0]
            free_out = sorted(set(range(n_letters)) - set(rho[q].tolist()))
            for a, b in zip(free_in, free_out):
                delta[q, a], rho[q, a] = e, b
        delta = np.vstack([delta, np.full((1, n_letters), e, dtype=np.int64)])
        rho = np.vstack([rho, np.arange(n_letters, dtype=np.int64)[None, :]])
        states = states + (sink,)
        logger.debug("sink completion added %d transitions", int((delta[:-1] == e).sum()))

    d = tuple(tuple(int(x) for x in row) for row in delta)
    r = tuple(tuple(int(x) for x in row) for row in rho)
    if sink is None:
        sink = detect_sink(states, d, r)
    return MealyAutomaton(states, P.letters, d, r, sink)


# =========================================================
# 3) Reflections
# =========================================================
def reflection_close(T: WangTileset, axes: str = "both") -> WangTileset:
    """Close T under the requested reflections; added tiles form T⁻, kp adjacency applies."""
    if axes not in REFLECTION_AXES:
        raise ValueError(f"Unsupported reflection axes: {axes!r}")
    maps = {"h": reflect_h, "v": reflect_v}
    new_axes = tuple(a for a in ("h", "v") if a in T.axes or a in REFLECTION_AXES[axes])
    tiles = list(T.tiles)
    seen = set(tiles)
    queue = deque(tiles)
    while queue:
        t = queue.popleft()
        for a in new_axes:
            r = maps[a](t)
            if r not in seen:
                seen.add(r)
                tiles.append(r)
                queue.append(r)
    positive = set(T.tiles) - set(T.negative)
    negative = frozenset(t for t in tiles if t not in positive)
    return WangTileset(tuple(tiles), "kp", new_axes, negative)


def _fits_right(T: WangTileset, left: WangTile, right: WangTile) -> bool:
    if left.east != right.west:
        return False
    return not (T.excludes("v") and right == reflect_v(left))


def _fits_above(T: WangTileset, below: WangTile, above: WangTile) -> bool:
    if below.north != above.south:
        return False
    return not (T.excludes("h") and above == reflect_h(below))


def _stacks(T: WangTileset, below: Sequence[WangTile], above: Sequence[WangTile]) -> bool:
    return all(_fits_above(T, b, a) for b, a in zip(below, above))


# =========================================================
# 4) Witnesses
# =========================================================
Grid = List[List[WangTile]]


@dataclass(frozen=True)
class TilingWitness:
    kind: str                                  # periodic | square | none
    m: Optional[int] = None
    grid: Tuple[Tuple[WangTile, ...], ...] = ()
    periods: Optional[Tuple[int, int]] = None  # (p_x, p_y)

    def __bool__(self) -> bool:
        return self.kind != "none"

    def validate(self, T: Optional[WangTileset] = None) -> bool:
        """Adjacencies inside the grid, plus the torus borders for a periodic witness."""
        if self.kind == "none":
            return not self.grid
        rows = [list(r) for r in self.grid]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            return False
        T = T if T is not None else WangTileset(tuple(t for r in rows for t in r))
        if any(t not in T.tile_set for r in rows for t in r):
            return False
        wrap = self.kind == "periodic"
        height, width = len(rows), len(rows[0])
        if wrap and self.periods != (width, height):
            return False
        if self.kind == "square" and not (height == width == self.m):
            return False
        for y in range(height):
            for x in range(width):
                if x + 1 < width or wrap:
                    if not _fits_right(T, rows[y][x], rows[y][(x + 1) % width]):
                        return False
                if y + 1 < height or wrap:
                    if not _fits_above(T, rows[y][x], rows[(y + 1) % height][x]):
                        return False
        return True

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "m": self.m,
            "periods": None if self.periods is None else list(self.periods),
            "grid": [[t.to_json() for t in row] for row in self.grid],
        }


def _checked(w: TilingWitness, T: Optional[WangTileset] = None) -> TilingWitness:
    if not w.validate(T):
        raise InternalError(f"{w.kind} witness failed validation")
    return w


def cross_grid(
    states: Sequence[str],
    letters: Sequence[str],
    delta: np.ndarray,
    rho: np.ndarray,
    u: Sequence[int],
    v: Sequence[int],
) -> Optional[Grid]:
    """Tiles of the cross-diagram of u on v, bottom row = rightmost state; None if it breaks off."""
    grid: Grid = []
    word = list(v)
    for s in reversed(u):
        row, out = [], []
        for a in word:
            p, b = int(delta[s, a]), int(rho[s, a])
            if p < 0:
                return None
            row.append(WangTile(states[s], letters[a], states[p], letters[b]))
            out.append(b)
            s = p
        grid.append(row)
        word = out
    return grid


def _periodic(grid: Grid) -> TilingWitness:
    return TilingWitness("periodic", None, tuple(tuple(r) for r in grid), (len(grid[0]), len(grid)))


def periodic_tiling(M: MealyAutomaton) -> TilingWitness:
    """Fundamental domain of T(M) from an H_{1,1} cycle, preferring one off the sink."""
    H = build_helix(M, 1, 1)
    cycles = H.cycles()
    e = M.sink_id
    chosen = next(
        (c for c in cycles if all(s != e for s in cycle_pair_ids(H, c)[0])),
        cycles[0],
    )
    u, v = cycle_pair_ids(H, chosen)
    grid = cross_grid(M.states, M.alphabet, M.delta_array, M.rho_array, u, v)
    logger.info("periodic tiling from (%s, %s)", " ".join(M.states[s] for s in u),
                " ".join(M.alphabet[a] for a in v))
    return _checked(_periodic(grid), tileset_from(M))


# =========================================================
# 5) Square and torus searches
# =========================================================
def tile_rows(T: WangTileset, length: int, limit: int, *, cyclic: bool = False) -> List[Tuple[WangTile, ...]]:
    """Every horizontally matching row of `length` tiles, in tile order."""
    by_west: Dict[str, List[WangTile]] = {}
    for t in T.tiles:
        by_west.setdefault(t.west, []).append(t)
    rows: List[Tuple[WangTile, ...]] = []
    stack: List[Tuple[WangTile, ...]] = [(t,) for t in reversed(T.tiles)]
    while stack:
        row = stack.pop()
        if len(row) == length:
            if cyclic and not _fits_right(T, row[-1], row[0]):
                continue
            rows.append(row)
            ensure_within(len(rows), limit, budget="nodes", what=f"rows of length {length}")
            continue
        last = row[-1]
        for t in reversed(by_west.get(last.east, [])):
            if _fits_right(T, last, t):
                stack.append(row + (t,))
    return rows


def can_tile_square(T: WangTileset, m: int, budget: Budget = DEFAULT_BUDGET) -> TilingWitness:
    """Exact m×m search: layers of reachable rows keyed by row, with parent pointers."""
    if m < 1:
        raise PreconditionError(f"square side must be >= 1, got {m}")
    rows = tile_rows(T, m, budget.nodes)
    by_south: Dict[Tuple[str, ...], List[int]] = {}
    for i, r in enumerate(rows):
        by_south.setdefault(tuple(t.south for t in r), []).append(i)

    parents: List[Dict[int, int]] = [{i: -1 for i in range(len(rows))}]
    for level in range(1, m):
        layer: Dict[int, int] = {}
        for i in parents[-1]:
            north = tuple(t.north for t in rows[i])
            for j in by_south.get(north, []):
                if j not in layer and _stacks(T, rows[i], rows[j]):
                    layer[j] = i
        if not layer:
            logger.debug("no %d-row stack of width %d", level + 1, m)
            return TilingWitness("none", m)
        parents.append(layer)
    if not parents[-1]:
        return TilingWitness("none", m)

    j = min(parents[-1])
    stack = []
    for layer in reversed(parents):
        stack.append(rows[j])
        j = layer[j]
    return _checked(TilingWitness("square", m, tuple(reversed(stack))), T)


def _torus(T: WangTileset, px: int, py: int, budget: Budget) -> Optional[Grid]:
    rows = tile_rows(T, px, budget.nodes, cyclic=True)
    by_south: Dict[Tuple[str, ...], List[int]] = {}
    for i, r in enumerate(rows):
        by_south.setdefault(tuple(t.south for t in r), []).append(i)

    def above(i: int) -> List[int]:
        north = tuple(t.north for t in rows[i])
        return [j for j in by_south.get(north, []) if _stacks(T, rows[i], rows[j])]

    for start in range(len(rows)):
        parents: List[Dict[int, int]] = [{start: -1}]
        for _ in range(py):
            layer: Dict[int, int] = {}
            for i in parents[-1]:
                for j in above(i):
                    layer.setdefault(j, i)
            parents.append(layer)
            if not layer:
                break
        if start in parents[-1]:
            j, stack = start, []
            for layer in reversed(parents[1:]):
                j = layer[j]
                stack.append(rows[j])
            return [list(r) for r in reversed(stack)]
    return None


# =========================================================
# 6) Three-way tiling status
# =========================================================
@dataclass(frozen=True)
class TilingStatus:
    status: str                               # periodic | no_tiling | unknown
    witness: Optional[TilingWitness] = None
    m: Optional[int] = None
    budgets: Dict[str, int] = field(default_factory=dict)
    budget_exhausted: bool = False

    def to_json(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "witness": None if self.witness is None else self.witness.to_json(),
            "m": self.m,
            "budgets": dict(self.budgets),
            "budget_exhausted": self.budget_exhausted,
        }


def _periodic_search(T: WangTileset, k_max: int, n_max: int, budget: Budget) -> Tuple[Optional[Grid], bool]:
    exhausted = False
    try:
        P = transducer_of(T) if T.mode == "plain" else None
    except (PartitionError, PreconditionError):
        P = None
    if P is not None:
        for _, _, pair in scan_pairs(P.delta, P.rho, P.states, P.letters, k_max, n_max, budget):
            if pair is None:
                exhausted = True
                continue
            u = [P.states.index(s) for s in pair.u]
            v = [P.letters.index(a) for a in pair.v]
            return cross_grid(P.states, P.letters, P.delta, P.rho, u, v), exhausted
        return None, exhausted
    for py, px in size_order(k_max, n_max):
        try:
            grid = _torus(T, px, py, budget)
        except BudgetExhausted:
            exhausted = True
            continue
        if grid is not None:
            return grid, exhausted
    return None, exhausted


def tiling_status(
    T: WangTileset,
    m_max: Optional[int] = None,
    k_max: Optional[int] = None,
    n_max: Optional[int] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> TilingStatus:
    m_max = budget.mmax if m_max is None else int(m_max)
    k_max = budget.kmax if k_max is None else int(k_max)
    n_max = budget.nmax if n_max is None else int(n_max)
    budgets = {"m_max": m_max, "k_max": k_max, "n_max": n_max}
    if not T.tiles:
        return TilingStatus("no_tiling", TilingWitness("none", 1), 1, budgets)

    grid, exhausted = _periodic_search(T, k_max, n_max, budget)
    if grid is not None:
        return TilingStatus("periodic", _checked(_periodic(grid), T), None, budgets, exhausted)

    for m in range(1, m_max + 1):
        try:
            w = can_tile_square(T, m, budget)
        except BudgetExhausted:
            exhausted = True
            break
        if not w:
            return TilingStatus("no_tiling", w, m, budgets, exhausted)
    logger.info("tiling status unknown within %s", budgets)
    return TilingStatus("unknown", None, None, budgets, exhausted)


# =========================================================
# 7) Synchronization
# =========================================================
def _merge_word(M: MealyAutomaton, p: int, q: int) -> Optional[Tuple[int, ...]]:
    """Shortest w with p·w = q·w (BFS on unordered pairs, letters in alphabet order)."""
    d = M.delta
    start = (min(p, q), max(p, q))
    parent: Dict[Tuple[int, int], Tuple[Optional[Tuple[int, int]], int]] = {start: (None, -1)}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node[0] == node[1]:
            word = []
            while parent[node][0] is not None:
                prev, a = parent[node]
                word.append(a)
                node = prev
            return tuple(reversed(word))
        for a in range(M.n_letters):
            x, y = d[node[0]][a], d[node[1]][a]
            nxt = (min(x, y), max(x, y))
            if nxt not in parent:
                parent[nxt] = (node, a)
                queue.append(nxt)
    return None


def synchronizing_word(M: MealyAutomaton) -> Optional[LetterWord]:
    """Greedy pair merging: repeatedly merge the least pair of the current state set."""
    current = set(range(M.n_states))
    word: List[int] = []
    while len(current) > 1:
        p, q = sorted(current)[:2]
        w = _merge_word(M, p, q)
        if w is None:
            logger.debug("states %s and %s never merge", M.states[p], M.states[q])
            return None
        for a in w:
            current = {M.delta[s][a] for s in current}
        word.extend(w)
    return tuple(M.alphabet[a] for a in word)


def _variant_tileset(M: MealyAutomaton, variant: str) -> WangTileset:
    base = tileset_from(M, reduced=True)
    if variant == "plain":
        return base
    closed = reflection_close(base, "h" if variant == "h" else "both")
    if closed.tiles:
        transducer_of(closed)
    return closed


def maxsync(M: MealyAutomaton, m: int, variant: str = "plain", budget: Budget = DEFAULT_BUDGET) -> bool:
    """MaxSync at size m, checked on non-synchronizing prefixes.

    Rows are runs of T̄(M) (reflection-closed for h and kp): a state q reading w off the sink.
    A word w is synchronizing (w ∈ Syn) when no row reads it. For each v of length m, NSyn(v)
    collects the state words u, one row per state, whose images u[:j]∘v stay outside Syn for every
    j <= |u|. Its words of length m-2 are the maximal candidates; MaxSync fails as soon as one of
    them extends by a state q with uq∘v still outside Syn. For m = 1 this reduces to v ∉ Syn.

    In the h and kp variants stacked rows obey kp adjacency, which keeps u reduced; in the kp
    variant v ranges over reduced signed words as well.
    """
    if variant not in MAXSYNC_VARIANTS:
        raise ValueError(f"Unsupported MaxSync variant: {variant!r}")
    if m < 1:
        raise PreconditionError(f"m must be >= 1, got {m}")
    ensure_sa(M, "maxsync")
    T = _variant_tileset(M, variant)
    by_ws = {(t.west, t.south): t for t in T.tiles}
    states = tuple(dict.fromkeys(t.west for t in T.tiles))
    letters = T.letter_colors

    def row(q: str, word: Sequence[str]) -> Optional[Tuple[WangTile, ...]]:
        tiles: List[WangTile] = []
        color = q
        for a in word:
            t = by_ws.get((color, a))
            if t is None or (tiles and not _fits_right(T, tiles[-1], t)):
                return None
            tiles.append(t)
            color = t.east
        return tuple(tiles)

    def rows_over(word: Sequence[str], below: Tuple[WangTile, ...]) -> List[Tuple[str, Tuple[WangTile, ...]]]:
        out = []
        for q in states:
            r = row(q, word)
            if r is not None and (not below or _stacks(T, below, r)):
                out.append((q, r))
        return out

    def outside_syn(word: Sequence[str], below: Tuple[WangTile, ...]) -> bool:
        return bool(rows_over(word, below))

    visited = 0
    for v in itertools.product(letters, repeat=m):
        if variant == "kp" and not is_reduced(v):
            continue
        if not outside_syn(v, ()):
            continue
        # NSyn(v) level by level: (u, image u∘v, last row)
        level: List[Tuple[Tuple[str, ...], Tuple[str, ...], Tuple[WangTile, ...]]] = [((), tuple(v), ())]
        for _ in range(m - 1):
            nxt: Dict[Any, Tuple[Tuple[str, ...], Tuple[str, ...], Tuple[WangTile, ...]]] = {}
            for u, word, below in level:
                for q, r in rows_over(word, below):
                    image = tuple(t.north for t in r)
                    key = (image, r if T.mode == "kp" else ())
                    if key in nxt or not outside_syn(image, r):
                        continue
                    nxt[key] = (u + (q,), image, r)
            visited += len(nxt)
            ensure_within(visited, budget.nodes, budget="nodes", what=f"MaxSync({m})")
            level = list(nxt.values())
            if not level:
                break
        if level:
            u = level[0][0]
            logger.info("MaxSync(%d) fails over %s with u=%s", m, " ".join(v), " ".join(u))
            return False
    return True
