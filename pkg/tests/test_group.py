"""Tests for mealy.group: identity/order, boundary points, witnesses, positive relations."""
from __future__ import annotations

import pytest

from mealy.config import Budget
from mealy.core import act, free_reduce
from mealy.errors import BudgetExhausted, NoSinkError, NotReversibleError, PreconditionError
from mealy.group import (
    EPW,
    act_epw,
    edge_lambda_psi,
    fully_positive,
    is_identity,
    lambda_value,
    order,
    parse_epw,
    positive_completion,
    positive_relation_search,
    reduced_words,
    singular_witness,
    stabilizes,
    ts_condition,
)


# ======================== Helpers ========================

def _periodic(*letters: str) -> EPW:
    return EPW.periodic(letters)


def _brute_identity(M, u, depth):
    """u acts trivially on every word up to `depth` letters."""
    words = [()]
    for _ in range(depth):
        words = [w + (a,) for w in words for a in M.alphabet]
        for w in words:
            if act(M, u, w)[0] != w:
                return False
    return True


# ======================== Boundary points ========================

class TestEventuallyPeriodicWord:
    def test_period_is_primitive(self):
        assert EPW((), ("0", "0")).period == ("0",)
        assert EPW((), ("0", "1", "0", "1")).period == ("0", "1")

    def test_preperiod_absorbed(self):
        assert EPW(("0",), ("1", "0")) == EPW((), ("0", "1"))
        assert EPW(("1", "2", "2"), ("2",)) == EPW(("1",), ("2",))

    def test_empty_period_rejected(self):
        with pytest.raises(ValueError):
            EPW(("0",), ())

    def test_prefix(self):
        assert EPW(("2",), ("0", "1")).prefix(5) == ("2", "0", "1", "0", "1")

    def test_cofinal(self):
        assert EPW(("1",), ("0", "1")).cofinal(_periodic("1", "0"))
        assert not _periodic("0").cofinal(_periodic("1"))

    def test_parse(self, hanoi):
        xi = parse_epw(hanoi, "01|2")
        assert xi == EPW(("0", "1"), ("2",))
        assert xi.to_text() == "01|2"
        assert parse_epw(hanoi, "|1").is_periodic

    def test_parse_requires_bar(self, hanoi):
        with pytest.raises(ValueError):
            parse_epw(hanoi, "012")


class TestActEpw:
    def test_basilica_b_on_zeros(self, basilica):
        assert act_epw(basilica, ("b",), _periodic("0")) == EPW((), ("1", "0"))

    def test_basilica_a_on_zeros(self, basilica):
        assert act_epw(basilica, ("a",), _periodic("0")) == _periodic("0", "1")

    def test_inverse_round_trip(self, basilica):
        xi = EPW(("1",), ("0",))
        moved = act_epw(basilica, ("a", "b"), xi)
        assert act_epw(basilica, ("b^-1", "a^-1"), moved) == xi

    def test_agrees_with_finite_prefix(self, hanoi):
        xi = EPW(("0", "1"), ("2", "0"))
        image = act_epw(hanoi, ("a", "c", "b"), xi)
        out, _ = act(hanoi, ("a", "c", "b"), xi.prefix(12))
        assert image.prefix(12) == out

    def test_hanoi_a_fixes_twos(self, hanoi):
        assert stabilizes(hanoi, ("a",), _periodic("2"))
        assert not stabilizes(hanoi, ("b",), _periodic("2"))


# ======================== Identity and order ========================

class TestIdentity:
    def test_free_cancellation(self, basilica):
        assert is_identity(basilica, ("a", "b", "b^-1", "a^-1"))

    def test_hanoi_involutions(self, hanoi):
        for q in ("a", "b", "c"):
            assert is_identity(hanoi, (q, q))
            assert not is_identity(hanoi, (q,))

    def test_sink_is_identity(self, hanoi):
        assert is_identity(hanoi, ("e", "e"))

    def test_agrees_with_brute_force_on_short_words(self, hanoi, basilica):
        for M in (hanoi, basilica):
            t = M.table
            gens = [i for i in range(len(t.names)) if i not in t.trivial]
            for length in (1, 2):
                for ids in reduced_words(t, gens, length):
                    u = t.state_names(ids)
                    assert is_identity(M, u) == _brute_identity(M, u, 6)

    def test_identity_implies_trivial_prefix_action(self, hanoi, rng):
        names = ["a", "b", "c", "a^-1", "b^-1", "c^-1"]
        for _ in range(500):
            u = tuple(rng.choice(names) for _ in range(rng.randint(1, 3)))
            if is_identity(hanoi, u):
                assert _brute_identity(hanoi, u, 4)

    def test_closure_budget(self, lamplighter):
        with pytest.raises(BudgetExhausted) as exc:
            is_identity(lamplighter, ("x",) * 10, Budget(closure=1))
        assert exc.value.budget == "closure"


class TestOrder:
    def test_exact(self, hanoi):
        assert order(hanoi, ("a",)).to_json() == {"exact": 2}

    def test_identity_word_has_order_one(self, basilica):
        assert order(basilica, ("a", "a^-1")).value == 1

    def test_lower_bound(self, lamplighter):
        result = order(lamplighter, ("x",), cap=8)
        assert not result.exact
        assert result.to_json() == {"at_least": 8}


# ======================== Singular witnesses ========================

class TestSingularWitness:
    def test_hanoi_twos(self, hanoi):
        rep = singular_witness(hanoi, _periodic("2"), 4, 4)
        assert rep.found
        assert rep.witness == ("a",)
        assert rep.exponent == 1
        assert rep.to_json()["witness"] == {"u": ["a"], "n": 1, "v": ["2"]}

    def test_witness_commutes_and_is_nontrivial(self, hanoi):
        rep = singular_witness(hanoi, _periodic("0", "1"), 3, 3)
        if rep.found:
            out, res = act(hanoi, rep.witness, rep.letters)
            assert out == rep.letters
            assert free_reduce(res) == free_reduce(rep.witness)
            assert not is_identity(hanoi, rep.witness)

    def test_basilica_regular_points(self, basilica):
        for xi in (_periodic("0", "1"), _periodic("0"), _periodic("1")):
            rep = singular_witness(basilica, xi, 4, 4)
            assert not rep.found
            assert not rep.budget_exhausted

    def test_preperiod_reported(self, hanoi):
        rep = singular_witness(hanoi, EPW(("0",), ("2",)), 2, 2)
        assert rep.details["tail"] == "|2"


# ======================== Positive relations ========================

class TestPositive:
    def test_hanoi_relation(self, hanoi):
        rep = positive_relation_search(hanoi, 2)
        assert rep.witness == ("a", "a")

    def test_lamplighter_free_semigroup(self, lamplighter):
        assert not positive_relation_search(lamplighter, 3).found

    def test_completion(self, hanoi):
        assert positive_completion(hanoi, ("a",), 2).witness == ("a",)

    def test_completion_rejects_inverse(self, hanoi):
        with pytest.raises(PreconditionError):
            positive_completion(hanoi, ("a^-1",), 2)

    def test_fully_positive_hanoi(self, hanoi):
        rep = fully_positive(hanoi, 2)
        assert rep.holds
        assert rep.completions == {"a": ("a",), "b": ("b",), "c": ("c",)}

    def test_fully_positive_basilica(self, basilica):
        rep = fully_positive(basilica, 2)
        assert not rep.holds
        assert rep.to_json()["completions"]["a"] is None


class TestTSCondition:
    def test_requires_reversible(self, basilica):
        with pytest.raises(NotReversibleError):
            ts_condition(basilica, ("0",))

    def test_verdict_values(self, lamplighter):
        rep = ts_condition(lamplighter, ("0",), k_max=2, l_max=6)
        assert rep.verdict in ("consistent", "undetermined")
        assert set(rep.to_json()) == {"verdict", "stabilizer", "dual_order"}


# ======================== λ / ψ ========================

class TestLambdaPsi:
    def test_lambda_values(self, basilica):
        t = basilica.table
        assert lambda_value(t, t.index["a"], _periodic("1")) == 1
        assert lambda_value(t, t.index["a"], _periodic("0")) is None
        assert lambda_value(t, t.index["e"], _periodic("0")) == 0

    def test_edge_statistics(self, basilica):
        rep = edge_lambda_psi(basilica, _periodic("1"), 1)
        assert rep.psi == 2
        assert ("0|1", "b", "|1", 2) in rep.edges
        assert rep.to_json()["radius"] == 1

    def test_needs_sink(self, lamplighter):
        with pytest.raises(NoSinkError):
            edge_lambda_psi(lamplighter, _periodic("0"), 1)
