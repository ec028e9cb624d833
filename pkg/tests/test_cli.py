"""Tests for mealy.cli: JSON reports agree with the library, exit codes, artifacts."""
from __future__ import annotations

import json

import pytest

from mealy.cli import EXIT_CODES, main, run
from mealy.core import classify
from mealy.corpus_data import get_automaton
from mealy.errors import InternalError, MealyError


# ======================== Helpers ========================

def _ok(*argv: str):
    result = run(list(argv))
    assert result.status in ("ok", "false_result"), result.payload
    return result


def _main_json(capsys, *argv: str):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


# ======================== Reports ========================

class TestReports:
    def test_classify_matches_library(self):
        result = _ok("classify", "basilica")
        expected = classify(get_automaton("basilica")).to_json()
        assert {k: v for k, v in result.payload.items() if k != "command"} == expected
        assert result.payload["command"] == "classify"

    def test_act_letter_word(self):
        payload = _ok("act", "basilica", "a", "00").payload
        assert payload["output"] == ["0", "1"]
        assert payload["residual"] == ["a"]

    def test_act_boundary_point(self):
        assert _ok("act", "basilica", "b", "|0").payload["image"] == "|10"

    def test_identity_false_is_not_an_error(self):
        result = _ok("identity", "hanoi3", "a")
        assert result.status == "false_result"
        assert result.exit_code == 0
        assert _ok("identity", "hanoi3", "a a").status == "ok"

    def test_order(self):
        payload = _ok("order", "lamplighter", "x", "--cap-order", "4").payload
        assert payload["order"] == {"at_least": 4}

    def test_helix_pairs(self):
        payload = _ok("helix", "lamplighter").payload
        assert payload["pairs"] == [{"u": ["y"], "v": ["1"]}]

    def test_commuting(self):
        payload = _ok("commuting", "hanoi3", "--kmax", "2", "--nmax", "2").payload
        assert payload["witness"] == {"u": ["a"], "v": ["2"]}

    def test_witness(self):
        payload = _ok("witness", "hanoi3", "|2", "--kmax", "2", "--nmax", "2").payload
        assert payload["witness"]["u"] == ["a"]

    def test_nucleus(self):
        payload = _ok("nucleus", "hanoi3").payload
        assert payload["size"] == 4

    def test_nucleus_not_verified(self):
        result = _ok("nucleus", "lamplighter", "--cap", "4", "--closure", "500")
        assert result.status == "false_result"
        assert result.payload["verified"] is False

    def test_stable(self):
        payload = _ok("stable", "basilica").payload
        assert payload["language"] == "empty"

    def test_schreier(self):
        payload = _ok("schreier", "hanoi3", "-l", "1", "--labels", "positive", "--skip-sink").payload
        assert payload["vertices"] == ["0", "1", "2"]
        assert ["2", "a", "2"] in payload["edges"]

    def test_upsilon_comparison(self):
        payload = _ok(
            "upsilon", "hanoi3", "|2", "a", "--radius", "2", "--skip-sink",
            "--level", "4", "--vertex", "2200",
        ).payload
        assert payload["comparison"]["isomorphic"] is True
        assert payload["root"] == "0:|2"

    def test_maxsync(self):
        assert _ok("maxsync", "basilica", "-m", "2").status == "ok"
        assert _ok("maxsync", "basilica", "-m", "1").status == "false_result"

    def test_sync(self):
        assert _ok("sync", "basilica").payload["word"] == ["1"]

    def test_tile_status(self):
        payload = _ok("tile", "unmatchable", "--nodes", "2000").payload
        assert payload["status"] == "no_tiling"
        assert payload["m"] == 2

    def test_tile_complete(self):
        payload = _ok("tile", "fourway", "--complete").payload
        assert payload["sink"] == "e"

    def test_tile_square(self):
        assert _ok("tile", "fourway", "-m", "3").payload["kind"] == "square"

    def test_tileset(self):
        payload = _ok("tileset", "lamplighter").payload
        assert payload["determinism"]["four_way"] is False
        assert len(payload["tiles"]) == 4

    def test_isolated(self):
        assert _ok("isolated", "hanoi3", "a", "2").payload["isolated"] is True

    def test_elementary(self):
        assert _ok("elementary", "trivial_detour", "q").payload["elementary"] is True

    def test_status(self):
        payload = _ok("status").payload
        assert "basilica" in payload["corpus"]
        assert payload["budget"]["kmax"] == 4


# ======================== Exit codes ========================

class TestExitCodes:
    def test_codes(self):
        assert EXIT_CODES == {
            "ok": 0,
            "false_result": 0,
            "usage_error": 64,
            "parse_error": 65,
            "internal_error": 70,
            "budget_exhausted": 75,
        }

    def test_unknown_command(self):
        assert run(["frobnicate"]).exit_code == 64

    def test_missing_argument(self):
        assert run(["act", "basilica"]).exit_code == 64

    def test_unknown_profile(self):
        assert run(["classify", "basilica", "--profile", "huge"]).exit_code == 64

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.mealy"
        path.write_text("states: a\nalphabet: 0\na 0 -> b 0\n", encoding="utf-8")
        result = run(["classify", str(path)])
        assert result.exit_code == 65
        assert result.payload["line"] == 3

    def test_precondition_is_data_error(self):
        assert run(["maxsync", "lamplighter", "-m", "1"]).exit_code == 65

    def test_budget(self):
        result = run(["helix", "hanoi3", "-k", "3", "-n", "3", "--nodes", "10"])
        assert result.exit_code == 75
        assert result.payload["budget"] == "nodes"
        assert result.payload["limit"] == 10

    def test_unknown_symbol(self):
        assert run(["act", "basilica", "z", "0"]).exit_code == 65

    def test_internal_error(self, monkeypatch):
        def broken(*args, **kwargs):
            raise InternalError("square witness failed validation")

        monkeypatch.setattr("mealy.cli.maxsync", broken)
        result = run(["maxsync", "basilica", "-m", "2"])
        assert result.exit_code == 70
        assert result.payload["type"] == "InternalError"
        assert result.payload["error"].startswith("INTERNAL: ")
        assert issubclass(InternalError, MealyError)


# ======================== main ========================

class TestMain:
    def test_stdout_json(self, capsys):
        code, doc = _main_json(capsys, "sync", "basilica")
        assert code == 0
        assert doc["word"] == ["1"]

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["classify", "hanoi3", "-o", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text(encoding="utf-8"))["in_sa"] is True

    def test_dot_artifact(self, tmp_path, capsys):
        dot = tmp_path / "helix.dot"
        main(["helix", "lamplighter", "--dot", str(dot)])
        capsys.readouterr()
        assert dot.read_text(encoding="utf-8").startswith("digraph")

    def test_ascii_artifact(self, tmp_path, capsys):
        art = tmp_path / "tiling.txt"
        main(["tile", "lamplighter", "--periodic", "--ascii", str(art)])
        capsys.readouterr()
        text = art.read_text(encoding="utf-8")
        assert text.startswith("periodic periods 1x1")

    @pytest.mark.parametrize("command", ["dual", "inverse", "enrich", "union", "minimize"])
    def test_transforms(self, capsys, command):
        code, doc = _main_json(capsys, command, "basilica")
        assert code == 0
        assert doc["alphabet"]
