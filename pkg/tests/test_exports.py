"""Tests for the export orchestrator and its DOT / ASCII / JSON renderers."""
from __future__ import annotations

import json

import pytest

from mealy.contracting import nucleus, stable_automaton
from mealy.export_orchestrator import run_export
from mealy.exports.ascii_grid import render_rows, render_witness
from mealy.exports.dot import automaton_dot, graph_dot, helix_dot, stable_dot
from mealy.exports.json_report import export_json, to_payload
from mealy.helix import build_helix
from mealy.orbits import schreier_level
from mealy.tilings import TilingWitness, WangTile, periodic_tiling


# ======================== DOT ========================

class TestDot:
    def test_automaton_merges_parallel_edges(self, lamplighter):
        text = automaton_dot(lamplighter)
        assert text.startswith('digraph "M" {')
        assert '"y" -> "x" [label="0|0"];' in text
        assert text.count('"x" -> "x"') == 1

    def test_sink_dashed(self, basilica):
        assert '"e" [style=dashed];' in automaton_dot(basilica)

    def test_stable_accepting(self, hanoi):
        text = stable_dot(stable_automaton(nucleus(hanoi)))
        assert '"a" [shape=doublecircle];' in text
        assert '"a" -> "a" [label="2|2"];' in text

    def test_helix_cycle_bold(self, lamplighter):
        H = build_helix(lamplighter, 1, 1)
        text = helix_dot(H)
        bold = [line for line in text.splitlines() if "style=bold" in line]
        assert len(bold) == 1 and "(y,1)" in bold[0]

    def test_graph_root(self, hanoi):
        from mealy.orbits import upsilon

        G = upsilon(schreier_level(hanoi, 1, labels="positive", skip_sink=True), ("2",), "a")
        text = graph_dot(G, fmt=str)
        assert "doublecircle" in text
        assert text.count("->") == len(G.edges())

    def test_escaping(self, lamplighter):
        assert automaton_dot(lamplighter, name='a"b').startswith('digraph "a\\"b"')


# ======================== ASCII ========================

class TestAscii:
    def test_single_tile(self):
        text = render_rows([[WangTile("q", "0", "p", "1")]])
        lines = text.splitlines()
        assert lines[0] == lines[-1]
        assert lines[1].strip("|").strip() == "1"
        assert lines[2] == "|q   p|"
        assert lines[3].strip("|").strip() == "0"

    def test_top_row_first(self):
        grid = [[WangTile("a", "0", "a", "1")], [WangTile("b", "1", "b", "2")]]
        lines = render_rows(grid).splitlines()
        assert "b" in lines[2] and "a" in lines[6]

    def test_no_tiling(self):
        assert render_witness(TilingWitness("none", 3)) == "no tiling of the 3x3 square\n"

    def test_periodic_header(self, hanoi):
        assert render_witness(periodic_tiling(hanoi)).startswith("periodic periods 1x1\n")


# ======================== JSON and orchestrator ========================

class TestJson:
    def test_payload_recurses(self, lamplighter):
        doc = to_payload({"m": lamplighter, "items": (1, 2)})
        assert doc["m"]["states"] == ["x", "y"]
        assert doc["items"] == [1, 2]

    def test_sorted_bytes(self, lamplighter):
        blob = export_json(lamplighter)
        assert blob.endswith(b"\n")
        assert list(json.loads(blob)) == sorted(json.loads(blob))


class TestOrchestrator:
    def test_dispatch(self, lamplighter, hanoi):
        assert run_export("dot", {"kind": "automaton", "value": lamplighter}).startswith(b"digraph")
        assert run_export("ascii", {"kind": "tiling", "value": periodic_tiling(hanoi)}).startswith(b"periodic")
        assert json.loads(run_export("json", {"kind": "report", "value": lamplighter}))["sink"] is None

    def test_mode_is_normalized(self, lamplighter):
        assert run_export(" DOT ", {"kind": "automaton", "value": lamplighter}).startswith(b"digraph")

    def test_unsupported(self, lamplighter):
        with pytest.raises(ValueError):
            run_export("ascii", {"kind": "automaton", "value": lamplighter})
        with pytest.raises(ValueError):
            run_export("svg", {"kind": "automaton", "value": lamplighter})
        with pytest.raises(ValueError):
            run_export("dot", "not a dict")
