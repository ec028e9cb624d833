"""mealy: singular points, helix graphs and Wang tilings of Mealy automaton groups."""
from __future__ import annotations

__version__ = "1.0.0"
