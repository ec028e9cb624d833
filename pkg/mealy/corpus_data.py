# mealy/corpus_data.py
# Bundled automata and tilesets.
from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path
from typing import Dict, List

from .core import MealyAutomaton, load_automaton

CORPUS_DIR = Path(__file__).resolve().parent / "corpus"


# =========================================================
# 1) Automata
# =========================================================
AUTOMATA: Dict[str, str] = {
    "lamplighter":        "lamplighter.mealy",
    "basilica":           "basilica.mealy",
    "hanoi3":             "hanoi3.mealy",
    "grigorchuk_twisted": "grigorchuk_twisted.mealy",
    "identity":           "identity.mealy",
}

# synthetic fixtures
FIXTURES: Dict[str, str] = {
    "double_sink":    "double_sink.mealy",
    "trivial_detour": "trivial_detour.mealy",
    "lazy_loop":      "lazy_loop.mealy",
    "reset":          "reset.mealy",
}

# Automata in S_a (invertible, sink accessible from every state)
SA_CORPUS: List[str] = ["basilica", "hanoi3", "grigorchuk_twisted", "identity"]


# =========================================================
# 2) Tilesets
# =========================================================
TILESETS: Dict[str, str] = {
    "fourway":     "fourway_tiles.json",
    "unmatchable": "unmatchable_tiles.json",
}


def corpus_names() -> List[str]:
    return list(AUTOMATA) + list(FIXTURES)


@lru_cache(maxsize=None)
def get_automaton(name: str) -> MealyAutomaton:
    key = str(name or "").strip().lower()
    fname = AUTOMATA.get(key) or FIXTURES.get(key)
    if fname is None:
        raise ValueError(f"Unknown corpus automaton: {name!r}")
    return load_automaton(str(CORPUS_DIR / fname))


def resolve_automaton(arg: str) -> MealyAutomaton:
    """A path to a .mealy/.json file, or the name of a bundled automaton."""
    if os.path.exists(arg):
        return load_automaton(arg)
    stem = Path(arg).name
    for suffix in (".mealy", ".json"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    return get_automaton(stem)


def tileset_path(name: str) -> str:
    key = str(name or "").strip().lower()
    if key not in TILESETS:
        raise ValueError(f"Unknown corpus tileset: {name!r}")
    return str(CORPUS_DIR / TILESETS[key])
