# mealy/export_orchestrator.py
from __future__ import annotations

from typing import Any, Dict


def run_export(mode: str, data: Dict[str, Any], **kwargs) -> bytes:
    """
    Single switch for every rendered artifact.

    data:
      {"kind": "automaton" | "stable" | "helix" | "graph" | "tiling" | "report",
       "value": <object>}

    Modes:
      - "json"  every kind (the object's to_json payload)
      - "dot"   automaton, stable, helix, graph
      - "ascii" tiling
    """
    if not isinstance(data, dict):
        raise ValueError("run_export: data must be a dict")

    mode = str(mode or "").strip().lower()
    kind = str(data.get("kind") or "").strip()
    value = data.get("value")

    if mode == "json":
        from .exports.json_report import export_json  # lazy import
        return export_json(value, indent=int(kwargs.get("indent", 2)))

    if mode == "dot":
        name = kwargs.get("name") or kind or "G"
        if kind == "automaton":
            from .exports.dot import automaton_dot
            return automaton_dot(value, name=name).encode("utf-8")
        if kind == "stable":
            from .exports.dot import stable_dot
            return stable_dot(value, name=name).encode("utf-8")
        if kind == "helix":
            from .exports.dot import helix_dot
            return helix_dot(value, name=name).encode("utf-8")
        if kind == "graph":
            from .exports.dot import graph_dot
            return graph_dot(value, name=name, fmt=kwargs.get("fmt", str)).encode("utf-8")
        raise ValueError(f"Unsupported export kind for dot: {kind!r}")

    if mode == "ascii":
        if kind == "tiling":
            from .exports.ascii_grid import render_witness
            return render_witness(value).encode("utf-8")
        raise ValueError(f"Unsupported export kind for ascii: {kind!r}")

    raise ValueError(f"Unsupported export request: kind={kind!r}, mode={mode!r}")
