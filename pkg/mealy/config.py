# mealy/config.py
# Search budgets and environment switches.
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Dict

# --- ENV / MODE ---
MEALY_ENV = os.getenv("MEALY_ENV", "dev").lower()  # dev | prod
IS_DEV = MEALY_ENV == "dev"


@dataclass(frozen=True)
class Budget:
    kmax: int = 4           # longest state word searched
    nmax: int = 6           # longest letter word searched
    mmax: int = 6           # largest square side
    cap: int = 64           # nucleus size / order cap
    nodes: int = 10000      # graph vertices (helix, Schreier, orbit, tiling rows)
    depth: int = 32         # longest nucleus representative
    closure: int = 50000    # section-closure words per identity test

    def replace(self, **overrides: int) -> "Budget":
        known = {f.name for f in fields(self)}
        clean = {k: int(v) for k, v in overrides.items() if k in known and v is not None}
        return replace(self, **clean)


BUDGET_PROFILES: Dict[str, Budget] = {
    "desk": Budget(),
    "deep": Budget(kmax=6, nmax=8, mmax=8, cap=256, nodes=200000, depth=64, closure=500000),
}


def get_budget(profile: str = "") -> Budget:
    """Budget for a named profile; empty name means MEALY_PROFILE or "desk"."""
    name = (profile or os.getenv("MEALY_PROFILE", "desk")).strip().lower()
    if name not in BUDGET_PROFILES:
        raise ValueError(f"Unknown budget profile: {name!r}")
    return BUDGET_PROFILES[name]


DEFAULT_BUDGET = BUDGET_PROFILES["desk"]
