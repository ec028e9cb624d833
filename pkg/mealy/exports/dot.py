# mealy/exports/dot.py
# -----------------------------------------------------------------------------
# PURPOSE: Graphviz DOT text for automata (Mealy and stable), helix graphs and
#          labeled orbital / Schreier graphs.
# CONTRACT:
#   - Output is deterministic: nodes and edges in sorted or file order.
#   - Parallel automaton edges between the same pair of states are merged
#     into one edge with comma-separated "a|b" labels.
# -----------------------------------------------------------------------------
from __future__ import annotations

from typing import Callable, Dict, Hashable, List, Tuple

from ..contracting import StableAutomaton
from ..core import MealyAutomaton
from ..helix import HelixGraph
from ..orbits import LabeledDigraph


def _q(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _merged(edges: List[Tuple[str, str, str]]) -> Dict[Tuple[str, str], List[str]]:
    merged: Dict[Tuple[str, str], List[str]] = {}
    for src, label, dst in edges:
        merged.setdefault((src, dst), []).append(label)
    return merged


def automaton_dot(M: MealyAutomaton, *, name: str = "M") -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for q in M.states:
        style = " [style=dashed]" if q == M.sink else ""
        lines.append(f"  {_q(q)}{style};")
    edges = [(q, f"{a}|{b}", p) for q, a, p, b in M.transitions()]
    for (src, dst), labels in _merged(edges).items():
        lines.append(f"  {_q(src)} -> {_q(dst)} [label={_q(', '.join(labels))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def stable_dot(P: StableAutomaton, *, name: str = "stable") -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    accepting = set(P.accepting)
    for i, q in enumerate(P.states):
        attrs = []
        if i in accepting:
            attrs.append("shape=doublecircle")
        if i == P.sink:
            attrs.append("style=dashed")
        lines.append(f"  {_q(q)}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    edges = [(q, f"{a}|{a}", p) for q, a, p in P.transitions()]
    for (src, dst), labels in _merged(edges).items():
        lines.append(f"  {_q(src)} -> {_q(dst)} [label={_q(', '.join(labels))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def helix_dot(H: HelixGraph, *, name: str = "helix") -> str:
    """One node per (u, v); cycle nodes are drawn bold."""
    on_cycle = {i for c in H.cycles() for i in c}

    def label(i: int) -> str:
        u, v = H.names(i)
        return f"({' '.join(u)},{' '.join(v)})"

    lines = [f"digraph {_q(name)} {{", "  node [shape=box];"]
    succ = H.succ.tolist()
    for i in range(len(succ)):
        style = ", style=bold" if i in on_cycle else ""
        lines.append(f"  n{i} [label={_q(label(i))}{style}];")
    for i, j in enumerate(succ):
        if j >= 0:
            lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_dot(G: LabeledDigraph, *, name: str = "orbit", fmt: Callable[[Hashable], str] = str) -> str:
    """Labeled digraph; the root (if any) is a double circle."""
    lines = [f"digraph {_q(name)} {{", "  node [shape=circle];"]
    for v in sorted(G.graph.nodes, key=fmt):
        shape = " [shape=doublecircle]" if v == G.root else ""
        lines.append(f"  {_q(fmt(v))}{shape};")
    for s, label, d in sorted(G.edges(), key=lambda e: (fmt(e[0]), e[1], fmt(e[2]))):
        lines.append(f"  {_q(fmt(s))} -> {_q(fmt(d))} [label={_q(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
