"""Tests for mealy.tilings: tilesets, determinism, completion, reflections, tilings, MaxSync."""
from __future__ import annotations

import pytest

from conftest import make_random_automaton
from mealy.config import Budget
from mealy.core import classify, union_identify_sinks
from mealy.corpus_data import AUTOMATA, SA_CORPUS, get_automaton, tileset_path
from mealy.errors import (
    IncompleteError,
    NoSinkError,
    ParseError,
    PartitionError,
    PreconditionError,
)
from mealy.tilings import (
    TilingWitness,
    WangTile,
    WangTileset,
    _fits_right,
    _variant_tileset,
    automaton_from_tileset,
    can_tile_square,
    determinism,
    load_tileset,
    maxsync,
    periodic_tiling,
    reflect_h,
    reflect_v,
    reflection_close,
    synchronizing_word,
    tile_rows,
    tileset_from,
    tiling_status,
    transducer_of,
)


# ======================== Helpers ========================

def _tile(text: str) -> WangTile:
    """'w s e n' -> WangTile."""
    return WangTile(*text.split())


def _fourway() -> WangTileset:
    return load_tileset(tileset_path("fourway"))


def _unmatchable() -> WangTileset:
    return load_tileset(tileset_path("unmatchable"))


# ======================== Tiles and tilesets ========================

class TestTiles:
    def test_reflections(self):
        t = _tile("a 0 b 1")
        assert reflect_h(t) == _tile("a^-1 1 b^-1 0")
        assert reflect_v(t) == _tile("b 0^-1 a 1^-1")

    def test_reflections_are_involutions(self):
        t = _tile("q 2 p^-1 3")
        assert reflect_h(reflect_h(t)) == t
        assert reflect_v(reflect_v(t)) == t

    def test_duplicates_dropped(self):
        T = WangTileset((_tile("a 0 b 1"), _tile("a 0 b 1")))
        assert len(T) == 1

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            WangTileset((), mode="hex")

    def test_json_defaults(self):
        T = WangTileset.from_json({"mode": "kp", "tiles": [{"w": "a", "s": "0", "e": "b", "n": "1"}]})
        assert T.axes == ("h", "v")
        assert T.to_json()["axes"] == ["h", "v"]

    def test_json_errors(self):
        with pytest.raises(ParseError):
            WangTileset.from_json({"tiles": [{"w": "a"}]})
        with pytest.raises(ParseError):
            WangTileset.from_json({"mode": "hex", "tiles": []})

    def test_colors(self):
        T = _fourway()
        assert T.state_colors == ("a", "b")
        assert T.letter_colors == ("1", "2", "3")


class TestTilesetFrom:
    def test_full(self, lamplighter):
        T = tileset_from(lamplighter)
        assert len(T) == 4
        assert _tile("x 0 y 1") in T.tile_set

    def test_reduced_basilica(self, basilica):
        T = tileset_from(basilica, reduced=True)
        assert T.tiles == (_tile("a 0 b 0"), _tile("b 0 a 1"))

    def test_reduced_needs_sink(self, lamplighter):
        with pytest.raises(NoSinkError):
            tileset_from(lamplighter, reduced=True)

    def test_restrict(self, lamplighter):
        assert tileset_from(lamplighter, restrict=["y"]).tiles == (_tile("y 1 y 1"),)

    def test_restrict_unknown(self, lamplighter):
        with pytest.raises(PreconditionError):
            tileset_from(lamplighter, restrict=["z"])


# ======================== Determinism and automata ========================

class TestDeterminism:
    def test_lamplighter(self, lamplighter):
        flags = determinism(tileset_from(lamplighter))
        assert (flags.ws, flags.es, flags.wn, flags.en) == (True, True, True, False)
        assert not flags.four_way

    def test_fourway(self):
        assert determinism(_fourway()).four_way

    def test_partition(self):
        with pytest.raises(PartitionError):
            transducer_of(WangTileset((_tile("a a b 0"),)))

    def test_not_ws(self):
        with pytest.raises(PreconditionError):
            transducer_of(WangTileset((_tile("a 0 b 0"), _tile("a 0 a 1"))))

    def test_flags_follow_classification(self, rng):
        """es, wn and en are reversibility, invertibility and coreversibility of M."""
        corpus = [get_automaton(name) for name in AUTOMATA]
        randoms = [make_random_automaton(rng, rng.randint(1, 4), rng.randint(1, 4)) for _ in range(200)]
        for M in corpus + randoms:
            flags = determinism(tileset_from(M))
            report = classify(M)
            assert flags.ws
            assert flags.es == report.reversible
            assert flags.wn == report.invertible
            assert flags.en == report.coreversible
            assert flags.four_way == (report.invertible and report.reversible and report.coreversible)


class TestAutomatonFromTileset:
    def test_round_trip(self, lamplighter, basilica):
        for M in (lamplighter, basilica):
            assert automaton_from_tileset(tileset_from(M)) == M

    def test_incomplete(self):
        with pytest.raises(IncompleteError) as exc:
            automaton_from_tileset(_fourway())
        assert set(exc.value.missing) == {("a", "3"), ("b", "1")}

    def test_sink_completion(self):
        M = automaton_from_tileset(_fourway(), sink_complete=True)
        assert M.states == ("a", "b", "e")
        assert M.sink == "e"
        assert M.step("a", "3") == ("e", "1")
        assert M.step("b", "1") == ("e", "3")
        assert M.is_invertible

    def test_fresh_sink_name(self):
        T = WangTileset((_tile("e 0 f 1"), _tile("f 1 e 0")))
        M = automaton_from_tileset(T, sink_complete=True)
        assert M.sink == "e0"

    def test_completion_needs_four_way(self, lamplighter):
        with pytest.raises(PreconditionError):
            automaton_from_tileset(tileset_from(lamplighter), sink_complete=True)

    def test_empty(self):
        with pytest.raises(PreconditionError):
            automaton_from_tileset(WangTileset())


# ======================== Reflections ========================

class TestReflectionClose:
    def test_closed_and_marked(self, basilica):
        base = tileset_from(basilica, reduced=True)
        T = reflection_close(base)
        assert T.mode == "kp"
        assert T.axes == ("h", "v")
        for t in T.tiles:
            assert reflect_h(t) in T.tile_set
            assert reflect_v(t) in T.tile_set
        assert not (set(base.tiles) & T.negative)
        assert T.negative == T.tile_set - base.tile_set

    def test_single_axis(self):
        T = reflection_close(WangTileset((_tile("a 0 b 1"),)), "h")
        assert T.tiles == (_tile("a 0 b 1"), _tile("a^-1 1 b^-1 0"))

    def test_kp_adjacency(self):
        left = _tile("x 0 y 1")
        T = reflection_close(WangTileset((left,)), "v")
        assert not _fits_right(T, left, reflect_v(left))
        assert _fits_right(WangTileset((left, reflect_v(left))), left, reflect_v(left))

    @pytest.mark.parametrize("axes", ["h", "v", "both"])
    def test_idempotent(self, hanoi, axes):
        once = reflection_close(tileset_from(hanoi, reduced=True), axes)
        twice = reflection_close(once, axes)
        assert twice.tile_set == once.tile_set
        assert (twice.axes, twice.negative) == (once.axes, once.negative)

    @pytest.mark.parametrize("name", ["basilica", "hanoi3", "grigorchuk_twisted"])
    def test_h_closure_is_union_with_inverse(self, name):
        M = get_automaton(name)
        union = tileset_from(union_identify_sinks(M), reduced=True)
        closed = reflection_close(tileset_from(M, reduced=True), "h")
        assert union.tile_set == closed.tile_set

    def test_unknown_axes(self):
        with pytest.raises(ValueError):
            reflection_close(WangTileset(), "diagonal")


# ======================== Tilings ========================

class TestPeriodicTiling:
    @pytest.mark.parametrize(
        "name, tile",
        [
            ("lamplighter", "y 1 y 1"),
            ("identity", "e 0 e 0"),
            ("hanoi3", "a 2 a 2"),
            ("basilica", "e 0 e 0"),
        ],
    )
    def test_fundamental_domain(self, name, tile):
        w = periodic_tiling(get_automaton(name))
        assert w.kind == "periodic"
        assert w.grid == ((_tile(tile),),)
        assert w.periods == (1, 1)

    def test_exists_for_every_automaton(self, rng):
        corpus = [get_automaton(name) for name in AUTOMATA]
        randoms = [make_random_automaton(rng, rng.randint(1, 4), rng.randint(1, 4)) for _ in range(200)]
        for M in corpus + randoms:
            w = periodic_tiling(M)
            assert w.kind == "periodic"
            assert w.validate(tileset_from(M))

    def test_validate_rejects_broken_torus(self):
        w = TilingWitness("periodic", None, ((_tile("a 0 b 1"),),), (1, 1))
        assert not w.validate()


class TestSquare:
    def test_rows(self):
        assert len(tile_rows(_fourway(), 2, 100)) == 8

    def test_unmatchable(self):
        T = _unmatchable()
        assert can_tile_square(T, 1).kind == "square"
        assert not can_tile_square(T, 2)

    def test_fourway_square(self):
        w = can_tile_square(_fourway(), 3)
        assert w.kind == "square"
        assert len(w.grid) == 3 and all(len(r) == 3 for r in w.grid)
        assert w.validate(_fourway())

    def test_side_positive(self):
        with pytest.raises(PreconditionError):
            can_tile_square(_fourway(), 0)

    def test_monotone_in_side(self, basilica, hanoi):
        for T in (_unmatchable(), _fourway(), tileset_from(basilica, reduced=True),
                  tileset_from(hanoi, reduced=True)):
            found = [bool(can_tile_square(T, m)) for m in range(1, 5)]
            assert found == sorted(found, reverse=True)

    def test_row_budget(self, lamplighter):
        from mealy.errors import BudgetExhausted

        with pytest.raises(BudgetExhausted):
            tile_rows(tileset_from(lamplighter), 8, 10)


class TestTilingStatus:
    def test_no_tiling(self):
        status = tiling_status(_unmatchable(), budget=Budget(nodes=2000))
        assert status.status == "no_tiling"
        assert status.m == 2

    def test_empty_tileset(self):
        status = tiling_status(WangTileset())
        assert (status.status, status.m) == ("no_tiling", 1)

    def test_reduced_hanoi_periodic(self, hanoi):
        status = tiling_status(tileset_from(hanoi, reduced=True))
        assert status.status == "periodic"
        assert status.witness.validate(tileset_from(hanoi, reduced=True))

    def test_kp_torus(self, lamplighter):
        T = WangTileset(tileset_from(lamplighter).tiles, mode="kp", axes=("h",))
        status = tiling_status(T, k_max=2, n_max=2)
        assert status.status == "periodic"
        assert status.witness.validate(T)

    def test_to_json(self):
        doc = tiling_status(_unmatchable(), budget=Budget(nodes=2000)).to_json()
        assert doc["witness"]["kind"] == "none"
        assert set(doc["budgets"]) == {"m_max", "k_max", "n_max"}


# ======================== Synchronization ========================

class TestSynchronization:
    def test_words(self, basilica, identity_automaton, lamplighter):
        assert synchronizing_word(basilica) == ("1",)
        assert synchronizing_word(identity_automaton) == ()
        assert synchronizing_word(lamplighter) is None

    def test_word_synchronizes(self, hanoi):
        word = synchronizing_word(hanoi)
        assert word is not None
        ends = set()
        for q in hanoi.states:
            for a in word:
                q, _ = hanoi.step(q, a)
            ends.add(q)
        assert len(ends) == 1

    def test_maxsync_basilica(self, basilica):
        assert not maxsync(basilica, 1)
        assert maxsync(basilica, 2)

    def test_maxsync_hanoi(self, hanoi):
        assert not maxsync(hanoi, 3)

    def test_maxsync_detour(self):
        assert maxsync(get_automaton("trivial_detour"), 1)

    @pytest.mark.parametrize("name", SA_CORPUS + ["trivial_detour"])
    @pytest.mark.parametrize("variant", ["plain", "h"])
    def test_maxsync_agrees_with_squares(self, name, variant):
        M = get_automaton(name)
        T = _variant_tileset(M, variant)
        for m in range(1, 4):
            assert maxsync(M, m, variant) == (not can_tile_square(T, m))

    def test_maxsync_excludes_reduced_squares(self, basilica, hanoi):
        for M in (basilica, hanoi):
            for m in range(1, 4):
                if maxsync(M, m):
                    assert can_tile_square(tileset_from(M, reduced=True), m).kind == "none"

    def test_maxsync_budget(self, hanoi):
        from mealy.errors import BudgetExhausted

        with pytest.raises(BudgetExhausted):
            maxsync(hanoi, 3, budget=Budget(nodes=1))

    def test_maxsync_guards(self, basilica, lamplighter):
        with pytest.raises(ValueError):
            maxsync(basilica, 2, "diagonal")
        with pytest.raises(PreconditionError):
            maxsync(basilica, 0)
        with pytest.raises(NoSinkError):
            maxsync(lamplighter, 1)
