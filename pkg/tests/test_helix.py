"""Tests for mealy.helix: helix graphs, commuting pairs, elementary relations, shapes."""
from __future__ import annotations

import itertools

import pytest

from conftest import make_random_automaton
from mealy.config import Budget
from mealy.core import act
from mealy.corpus_data import get_automaton
from mealy.errors import BudgetExhausted, NotReversibleError, PreconditionError
from mealy.helix import (
    CommutingPair,
    build_helix,
    cycles_to_pairs,
    cyclic_reduce,
    helix_shape,
    is_elementary_relation,
    non_elementary_commuting_pair,
    restricted_commuting_pair,
    size_order,
)


# ======================== Helpers ========================

def brute_force_pairs(M, k, n):
    """Every (u, v) with |u| = k, |v| = n and u·v = u, u∘v = v."""
    found = set()
    for u in itertools.product(M.states, repeat=k):
        for v in itertools.product(M.alphabet, repeat=n):
            if act(M, u, v) == (v, u):
                found.add((u, v))
    return found


def fixed_points(H):
    return {H.names(i) for i, j in enumerate(H.succ.tolist()) if i == j}


# ======================== Helix graph ========================

class TestHelixGraph:
    def test_lamplighter_h11(self, lamplighter):
        H = build_helix(lamplighter, 1, 1)
        assert len(H) == 4
        assert H.successor(("x",), ("0",)) == (("y",), ("1",))
        assert H.successor(("y",), ("0",)) == (("x",), ("0",))
        assert cycles_to_pairs(H) == [CommutingPair(("y",), ("1",))]

    def test_signed_nodes_are_not_reduced(self, basilica):
        H = build_helix(basilica, 2, 1, signed=True)
        assert len(H) == 6 ** 2 * 2
        assert H.successor(("a", "a^-1"), ("0",)) is not None

    def test_index_and_node_agree(self, hanoi):
        H = build_helix(hanoi, 2, 2)
        for i in (0, 7, 55, len(H) - 1):
            u, v = H.names(i)
            assert H.index(u, v) == i

    def test_successors_match_action(self, rng):
        for _ in range(15):
            M = make_random_automaton(rng, rng.randint(1, 3), rng.randint(1, 3))
            k, n = rng.randint(1, 2), rng.randint(1, 2)
            H = build_helix(M, k, n)
            for i in range(len(H)):
                u, v = H.names(i)
                out, res = act(M, u, v)
                assert H.names(int(H.succ[i])) == (res, out)

    def test_self_loops_are_commuting_pairs(self, rng):
        for _ in range(15):
            M = make_random_automaton(rng, rng.randint(1, 3), rng.randint(1, 3))
            for k, n in itertools.product((1, 2), repeat=2):
                assert fixed_points(build_helix(M, k, n)) == brute_force_pairs(M, k, n)

    def test_cycle_pairs_commute(self, grigorchuk):
        H = build_helix(grigorchuk, 2, 2)
        pairs = cycles_to_pairs(H)
        assert pairs
        for pair in pairs:
            assert act(grigorchuk, pair.u, pair.v) == (pair.v, pair.u)

    def test_cycles_start_at_least_node(self, basilica):
        H = build_helix(basilica, 2, 1)
        heads = [c[0] for c in H.cycles()]
        assert heads == sorted(heads)
        assert all(c[0] == min(c) for c in H.cycles())

    def test_signed_states(self, basilica):
        H = build_helix(basilica, 1, 1, signed=True)
        assert len(H) == 12
        assert H.successor(("b^-1",), ("1",)) == (("a^-1",), ("0",))

    def test_signed_letters(self, lamplighter):
        H = build_helix(lamplighter, 1, 1, letters_signed=True)
        assert H.letter_names == ("0", "1", "0^-1", "1^-1")
        assert H.successor(("y",), ("0^-1",)) == (("x",), ("1^-1",))

    def test_signed_letters_need_reversible(self, basilica):
        with pytest.raises(NotReversibleError):
            build_helix(basilica, 1, 1, letters_signed=True)

    def test_signed_both_need_bireversible(self, lamplighter):
        with pytest.raises(PreconditionError):
            build_helix(lamplighter, 1, 1, signed=True, letters_signed=True)

    def test_node_budget(self, hanoi):
        with pytest.raises(BudgetExhausted):
            build_helix(hanoi, 3, 3, budget=Budget(nodes=100))

    def test_sizes_positive(self, hanoi):
        with pytest.raises(PreconditionError):
            build_helix(hanoi, 0, 1)

    def test_to_json(self, lamplighter):
        doc = build_helix(lamplighter, 1, 1).to_json()
        assert doc["cycles"] == [[{"u": ["y"], "v": ["1"]}]]
        assert len(doc["nodes"]) == 4


# ======================== Commuting-pair searches ========================

class TestCommutingPairs:
    def test_size_order(self):
        assert list(size_order(2, 2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_restricted(self, lamplighter):
        rep = restricted_commuting_pair(lamplighter, ["y"], 2, 2)
        assert rep.found
        assert (rep.witness, rep.letters) == (("y",), ("1",))
        assert rep.details["k"] == 1 and rep.details["n"] == 1

    def test_restricted_prunes_leaving_transitions(self, lamplighter):
        rep = restricted_commuting_pair(lamplighter, ["x"], 2, 2)
        if rep.found:
            assert set(rep.witness) == {"x"}

    def test_restricted_needs_states(self, lamplighter):
        with pytest.raises(PreconditionError):
            restricted_commuting_pair(lamplighter, [])

    def test_hanoi_non_elementary(self, hanoi):
        rep = non_elementary_commuting_pair(hanoi, 2, 2)
        assert (rep.witness, rep.letters) == (("a",), ("2",))
        assert rep.details["pi_u_trivial"] is False

    def test_vacuous_without_generators(self, identity_automaton):
        rep = non_elementary_commuting_pair(identity_automaton, 2, 2)
        assert not rep.found
        assert rep.details == {"vacuous": True}

    def test_budget_marks_report(self, basilica):
        rep = non_elementary_commuting_pair(basilica, 2, 2, budget=Budget(nodes=3))
        assert not rep.found
        assert rep.budget_exhausted


class TestElementaryRelation:
    def test_detour_is_elementary(self):
        assert is_elementary_relation(get_automaton("trivial_detour"), ("q",))

    def test_lazy_loop_is_not(self):
        assert not is_elementary_relation(get_automaton("lazy_loop"), ("q",))

    def test_hanoi_square(self, hanoi):
        assert not is_elementary_relation(hanoi, ("a", "a"))

    def test_free_reduced_sections_are_trivial(self, basilica):
        assert is_elementary_relation(basilica, ("a", "a^-1"))
        assert is_elementary_relation(basilica, ("b^-1", "b"))

    def test_needs_relation(self, hanoi):
        with pytest.raises(PreconditionError):
            is_elementary_relation(hanoi, ("a",))


# ======================== Shapes ========================

class TestShape:
    def test_cyclic_reduce(self):
        assert cyclic_reduce(("a", "b", "a^-1")) == ("b",)
        assert cyclic_reduce(("a", "a^-1")) == ()

    def test_hanoi_not_singular(self, hanoi):
        verdict = helix_shape(hanoi, 1, 1, "singular")
        assert not verdict.holds
        assert verdict.offending == CommutingPair(("a",), ("2",))

    def test_identity_singular(self, identity_automaton):
        assert helix_shape(identity_automaton, 2, 2, "singular").holds

    def test_lazy_loop_modes_differ(self):
        M = get_automaton("lazy_loop")
        assert not helix_shape(M, 1, 1, "singular").holds
        assert helix_shape(M, 1, 1, "strongly_singular").holds

    def test_hanoi_strongly(self, hanoi):
        for mode in ("strongly_singular", "essentially_singular"):
            verdict = helix_shape(hanoi, 1, 1, mode)
            assert not verdict.holds
            assert verdict.to_json()["offending"] is not None

    def test_unknown_mode(self, hanoi):
        with pytest.raises(ValueError):
            helix_shape(hanoi, 1, 1, "weakly")

    def test_singular_shapes_exclude_non_elementary_pairs(self, basilica):
        singular = {(k, n): helix_shape(basilica, k, n, "singular").holds for k, n in size_order(2, 2)}
        for k, n in size_order(2, 2):
            below = all(singular[(i, j)] for i, j in size_order(k, n))
            found = non_elementary_commuting_pair(basilica, k, n).found
            assert not (below and found)
