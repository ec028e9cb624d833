# mealy/exports/json_report.py
from __future__ import annotations

import json
from typing import Any


def to_payload(value: Any) -> Any:
    """Reports expose to_json(); plain containers pass through."""
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, (list, tuple)):
        return [to_payload(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_payload(v) for k, v in value.items()}
    return value


def export_json(value: Any, *, indent: int = 2) -> bytes:
    text = json.dumps(to_payload(value), sort_keys=True, indent=indent, ensure_ascii=False)
    return (text + "\n").encode("utf-8")
