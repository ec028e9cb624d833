# mealy/orbits.py
# -----------------------------------------------------------------------------
# PURPOSE: Labeled Schreier / orbital graphs (networkx MultiDiGraph, edge key =
#          generator label), the two-copy loop surgery and rooted ball
#          isomorphism.
# CONTRACT:
#   - Out-degree per (vertex, label) is at most one.
#   - Truncation is a reported state; every statement about an orbit is a
#     statement about the explored ball.
# -----------------------------------------------------------------------------
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism

from .config import DEFAULT_BUDGET, Budget
from .core import MealyAutomaton, inv_name
from .errors import PreconditionError
from .group import EventuallyPeriodicWord, act_epw_ids, generator_ids
from .preflight import ensure_invertible, ensure_within

logger = logging.getLogger(__name__)

LABEL_MODES = ("signed", "positive")


@dataclass
class LabeledDigraph:
    graph: nx.MultiDiGraph = field(default_factory=nx.MultiDiGraph)
    root: Optional[Hashable] = None
    truncated: bool = False

    # ---- construction ----
    def add_vertex(self, v: Hashable) -> None:
        self.graph.add_node(v)

    def add_edge(self, src: Hashable, label: str, dst: Hashable, *, positive: bool = True) -> None:
        if self.graph.has_edge(src, dst, key=label):
            return
        if self.successor(src, label) is not None:
            raise ValueError(f"vertex {src!r} already has an edge labeled {label!r}")
        self.graph.add_edge(src, dst, key=label, label=label, positive=positive)

    # ---- queries ----
    def vertices(self) -> List[Hashable]:
        return list(self.graph.nodes)

    def edges(self) -> List[Tuple[Hashable, str, Hashable]]:
        return [(s, k, d) for s, d, k in self.graph.edges(keys=True)]

    def successor(self, v: Hashable, label: str) -> Optional[Hashable]:
        if v not in self.graph:
            return None
        for _, d, k in self.graph.out_edges(v, keys=True):
            if k == label:
                return d
        return None

    def loops(self, v: Hashable) -> List[str]:
        return sorted(k for _, d, k in self.graph.out_edges(v, keys=True) if d == v)

    def __len__(self) -> int:
        return self.graph.number_of_nodes()

    def positive_cycle(self) -> Optional[List[Tuple[Hashable, str, Hashable]]]:
        """A directed cycle using positive, non-trivial labels only (None if acyclic)."""
        H = nx.MultiDiGraph()
        H.add_edges_from(
            (s, d, k) for s, d, k, pos in self.graph.edges(keys=True, data="positive") if pos
        )
        try:
            cyc = nx.find_cycle(H)
        except nx.NetworkXNoCycle:
            return None
        return [(s, k, d) for s, d, k in cyc]

    def ball(self, center: Hashable, radius: int) -> "LabeledDigraph":
        """Induced subgraph on the vertices within undirected distance `radius`."""
        dist = nx.single_source_shortest_path_length(self.graph.to_undirected(as_view=True), center, cutoff=radius)
        sub = self.graph.subgraph(dist).copy()
        return LabeledDigraph(sub, center, self.truncated)

    def to_json(self, fmt=str) -> Dict[str, Any]:
        return {
            "root": None if self.root is None else fmt(self.root),
            "truncated": self.truncated,
            "vertices": sorted(fmt(v) for v in self.graph.nodes),
            "edges": sorted([fmt(s), k, fmt(d)] for s, k, d in self.edges()),
        }


# =========================================================
# 1) Level Schreier graphs
# =========================================================
def _label_ids(M: MealyAutomaton, labels: str, skip_sink: bool) -> List[int]:
    if labels not in LABEL_MODES:
        raise ValueError(f"Unsupported label mode: {labels!r}")
    if labels == "signed":
        ensure_invertible(M)
    return generator_ids(M.table, signed=labels == "signed", skip_sink=skip_sink)


def level_words(n_letters: int, n: int) -> np.ndarray:
    """All words of length n as rows, lexicographic (first letter most significant)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(n_letters), repeat=n)), dtype=np.int64)


def schreier_level(
    M: MealyAutomaton,
    n: int,
    *,
    labels: str = "signed",
    skip_sink: bool = False,
    budget: Budget = DEFAULT_BUDGET,
) -> LabeledDigraph:
    """Action graph on X^n: w —q→ q∘w."""
    t = M.table
    gens = _label_ids(M, labels, skip_sink)
    size = M.n_letters ** n
    ensure_within(size, budget.nodes, budget="nodes", what=f"level-{n} Schreier graph")
    words = level_words(M.n_letters, n)
    weights = M.n_letters ** np.arange(n - 1, -1, -1, dtype=np.int64)
    names = [tuple(M.alphabet[a] for a in row) for row in words.tolist()]
    G = LabeledDigraph()
    for w in names:
        G.add_vertex(w)
    for g in gens:
        state = np.full(size, g, dtype=np.int64)
        out = np.empty_like(words)
        for j in range(n):
            col = words[:, j]
            out[:, j] = t.rho[state, col]
            state = t.delta[state, col]
        targets = (out @ weights).tolist() if n else [0] * size
        label = t.names[g]
        positive = g < t.n and g not in t.trivial
        for i, j in enumerate(targets):
            G.add_edge(names[i], label, names[j], positive=positive)
    logger.debug("schreier level %d: %d vertices, %d edges", n, len(G), G.graph.number_of_edges())
    return G


# =========================================================
# 2) Orbital graphs of boundary points
# =========================================================
def orbit_epw(
    M: MealyAutomaton,
    xi: EventuallyPeriodicWord,
    node_cap: Optional[int] = None,
    *,
    radius: Optional[int] = None,
    labels: str = "signed",
    skip_sink: bool = False,
) -> LabeledDigraph:
    """BFS over act_epw from xi; stops at node_cap (truncated) or at radius."""
    ensure_invertible(M)
    node_cap = DEFAULT_BUDGET.nodes if node_cap is None else int(node_cap)
    t = M.table
    gens = _label_ids(M, labels, skip_sink)
    # moves along inverses too, so the ball is the undirected one
    moves = sorted(set(gens) | {t.inv(g) for g in gens})
    dist = {xi: 0}
    queue = deque([xi])
    truncated = False
    while queue:
        v = queue.popleft()
        if radius is not None and dist[v] >= radius:
            continue
        for g in moves:
            w = act_epw_ids(t, (g,), v)
            if w in dist:
                continue
            if len(dist) >= node_cap:
                truncated = True
                continue
            dist[w] = dist[v] + 1
            queue.append(w)
    G = LabeledDigraph(root=xi, truncated=truncated)
    for v in dist:
        G.add_vertex(v)
    for v in dist:
        for g in gens:
            w = act_epw_ids(t, (g,), v)
            if w in dist:
                G.add_edge(v, t.names[g], w, positive=g < t.n and g not in t.trivial)
    if truncated:
        logger.info("orbit of %s truncated at %d vertices", xi, node_cap)
    return G


# =========================================================
# 3) Loop surgery and ball isomorphism
# =========================================================
def upsilon(ball: LabeledDigraph, looped_vertex: Hashable, loop_label: str) -> LabeledDigraph:
    """Two copies; the loop at looped_vertex becomes a pair of crossing edges."""
    if loop_label not in ball.loops(looped_vertex):
        raise PreconditionError(f"no loop labeled {loop_label!r} at {looped_vertex!r}")
    cut = {loop_label, inv_name(loop_label)} & set(ball.loops(looped_vertex))
    out = LabeledDigraph(root=(0, looped_vertex), truncated=ball.truncated)
    for copy in (0, 1):
        for v in ball.graph.nodes:
            out.add_vertex((copy, v))
        for s, d, k, pos in ball.graph.edges(keys=True, data="positive"):
            if s == looped_vertex and d == looped_vertex and k in cut:
                continue
            out.add_edge((copy, s), k, (copy, d), positive=bool(pos))
    for k in sorted(cut):
        pos = bool(ball.graph.edges[looped_vertex, looped_vertex, k].get("positive", True))
        out.add_edge((0, looped_vertex), k, (1, looped_vertex), positive=pos)
        out.add_edge((1, looped_vertex), k, (0, looped_vertex), positive=pos)
    return out


def _marked_ball(G: LabeledDigraph, root: Hashable, radius: int) -> nx.MultiDiGraph:
    B = G.ball(root, radius).graph
    nx.set_node_attributes(B, False, "root")
    B.nodes[root]["root"] = True
    return B


def rooted_ball_isomorphic(
    G1: LabeledDigraph, r1: Hashable, G2: LabeledDigraph, r2: Hashable, radius: int
) -> bool:
    B1 = _marked_ball(G1, r1, radius)
    B2 = _marked_ball(G2, r2, radius)
    if B1.number_of_nodes() != B2.number_of_nodes() or B1.number_of_edges() != B2.number_of_edges():
        return False
    matcher = isomorphism.MultiDiGraphMatcher(
        B1,
        B2,
        node_match=isomorphism.categorical_node_match("root", False),
        edge_match=isomorphism.categorical_multiedge_match("label", None),
    )
    return matcher.is_isomorphic()

