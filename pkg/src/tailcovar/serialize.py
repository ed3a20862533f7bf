"""Deterministic JSON and CSV emission.

Floating-point numbers are written with 17 significant digits so that every
binary64 value round-trips exactly; running the same command twice yields
byte-identical files.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

__all__ = ["format_float", "dumps", "write_csv", "format_row"]


def format_float(v: float) -> str:
    """Render a float with 17 significant digits (exact round-trip)."""
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    out = format(v, ".17g")
    if not any(ch in out for ch in ".eE"):
        out += ".0"
    return out


def _encode(obj, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(format_float(obj))
    elif isinstance(obj, str):
        import json

        parts.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _encode(obj.tolist(), parts)
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                parts.append(", ")
            _encode(str(key), parts)
            parts.append(": ")
            _encode(val, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, val in enumerate(obj):
            if i:
                parts.append(", ")
            _encode(val, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Serialize nested dicts/lists/scalars to a JSON string."""
    parts: list[str] = []
    _encode(obj, parts)
    return "".join(parts)


def format_row(row: Sequence) -> str:
    """Format one CSV row: ints verbatim, floats with 17 significant digits."""
    fields = []
    for v in row:
        if isinstance(v, (bool, np.bool_)):
            fields.append("1" if v else "0")
        elif isinstance(v, (int, np.integer)):
            fields.append(str(int(v)))
        elif isinstance(v, (float, np.floating)):
            fields.append(format_float(v))
        else:
            fields.append(str(v))
    return ",".join(fields)


def write_csv(path, header: str, rows: Iterable[Sequence]) -> None:
    """Write rows to ``path`` with a header line and ``\\n`` newlines."""
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(format_row(row) + "\n")
