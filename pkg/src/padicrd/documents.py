"""Structured-document output: JSON with full-precision floats.

Machine-readable files print every float with 17 significant digits so
a reader recovers the exact double; human-facing tables elsewhere round
to 6.
"""

from __future__ import annotations

import math
from pathlib import Path

__all__ = ["format_float", "to_json", "write_json"]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def to_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        escaped = (
            obj.replace("\\", "\\\\")
            .replace('"', '\\"')
            .replace("\n", "\\n")
            .replace("\t", "\\t")
        )
        return f'"{escaped}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{inner}{to_json(str(k))}: {to_json(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if hasattr(obj, "item"):  # numpy scalar
        return to_json(obj.item(), indent)
    if hasattr(obj, "tolist"):  # numpy array
        return to_json(obj.tolist(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(to_json(obj) + "\n")
    return path
