"""Shared fixtures: the bundled corpus and seeded random automata."""
from __future__ import annotations

import random
from typing import Callable

import pytest

from mealy.config import Budget
from mealy.core import MealyAutomaton, build_automaton
from mealy.corpus_data import get_automaton


@pytest.fixture
def lamplighter() -> MealyAutomaton:
    return get_automaton("lamplighter")


@pytest.fixture
def basilica() -> MealyAutomaton:
    return get_automaton("basilica")


@pytest.fixture
def hanoi() -> MealyAutomaton:
    return get_automaton("hanoi3")


@pytest.fixture
def grigorchuk() -> MealyAutomaton:
    return get_automaton("grigorchuk_twisted")


@pytest.fixture
def identity_automaton() -> MealyAutomaton:
    return get_automaton("identity")


@pytest.fixture
def small_budget() -> Budget:
    return Budget(kmax=2, nmax=2, mmax=3, cap=16, nodes=2000, depth=8, closure=2000)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


def make_random_automaton(
    rng: random.Random, n_states: int, n_letters: int, *, invertible: bool = False
) -> MealyAutomaton:
    states = [f"q{i}" for i in range(n_states)]
    alphabet = [str(a) for a in range(n_letters)]
    edges = {}
    for q in states:
        outs = rng.sample(alphabet, n_letters) if invertible else [rng.choice(alphabet) for _ in alphabet]
        for a, b in zip(alphabet, outs):
            edges[(q, a)] = (rng.choice(states), b)
    return build_automaton(states, alphabet, edges)


@pytest.fixture
def random_automaton(rng: random.Random) -> Callable[..., MealyAutomaton]:
    """Factory: random_automaton(max_states=4, max_letters=4, invertible=False)."""

    def factory(max_states: int = 4, max_letters: int = 4, invertible: bool = False) -> MealyAutomaton:
        return make_random_automaton(
            rng, rng.randint(1, max_states), rng.randint(1, max_letters), invertible=invertible
        )

    return factory
