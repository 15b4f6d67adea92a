"""JSON serialization with full-precision floats.

Serialized artifacts are reloaded and replayed by acceptance checks, so
floats are rendered with 17 significant digits, enough to reconstruct
the exact IEEE-754 double on load.  Output is deterministic: the same
document always produces the same bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

__all__ = ["dumps", "dump", "load"]


def _render(value, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(key))}: {_render(val, indent + 1)}"
            for key, val in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ",\n".join(f"{inner}{_render(val, indent + 1)}" for val in value)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("cannot serialize non-finite float")
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(document) -> str:
    """Render a document as pretty-printed JSON with full-precision floats."""
    return _render(document, 0) + "\n"


def dump(document, path) -> None:
    Path(path).write_text(dumps(document), encoding="utf-8")


def load(path):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)
