# mealy/exports/ascii_grid.py
# Plain-text rendering of tiling witnesses; the top row is printed first.
from __future__ import annotations

from typing import List, Sequence

from ..tilings import TilingWitness, WangTile


def _cell(t: WangTile, width: int) -> List[str]:
    gap = width - len(t.west) - len(t.east)
    return [
        t.north.center(width),
        t.west + " " * gap + t.east,
        t.south.center(width),
    ]


def render_rows(grid: Sequence[Sequence[WangTile]]) -> str:
    if not grid:
        return "(empty)\n"
    width = max(
        max(len(t.north), len(t.south), len(t.west) + len(t.east) + 3) for row in grid for t in row
    )
    rule = "+" + "+".join("-" * width for _ in grid[0]) + "+"
    out = [rule]
    for row in reversed(grid):
        cells = [_cell(t, width) for t in row]
        for k in range(3):
            out.append("|" + "|".join(c[k] for c in cells) + "|")
        out.append(rule)
    return "\n".join(out) + "\n"


def render_witness(w: TilingWitness) -> str:
    if w.kind == "none":
        return f"no tiling of the {w.m}x{w.m} square\n"
    head = f"{w.kind}"
    if w.periods is not None:
        head += f" periods {w.periods[0]}x{w.periods[1]}"
    if w.m is not None:
        head += f" m={w.m}"
    return head + "\n" + render_rows(w.grid)
