"""Report serialization: CSV traces and JSON summaries.

All floating-point output uses 17 significant digits so values round-trip
bit-exactly through text.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math

import numpy as np


def fmt17(x: float) -> str:
    return "%.17g" % float(x)


def _plain(obj):
    """Reduce an object to JSON-compatible builtins (floats kept as floats)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps_json(obj, indent: int = 2) -> str:
    """Deterministic JSON with sorted keys and 17-significant-digit floats."""
    return _emit(_plain(obj), indent, 0) + "\n"


def _emit(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "NaN"
        if math.isinf(obj):
            return "Infinity" if obj > 0 else "-Infinity"
        return fmt17(obj)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {_emit(v, indent, level + 1)}' for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_json(path, obj) -> None:
    with open(path, "w") as f:
        f.write(dumps_json(obj))


def trace_csv_lines(steps, columns: dict) -> list[str]:
    names = list(columns.keys())
    lines = [",".join(["step"] + names)]
    for i, t in enumerate(steps):
        row = [str(int(t))] + [fmt17(columns[c][i]) for c in names]
        lines.append(",".join(row))
    return lines


def write_trace_csv(path, steps, columns: dict) -> None:
    with open(path, "w") as f:
        f.write("\n".join(trace_csv_lines(steps, columns)) + "\n")


def write_trace_jsonl(path, steps, columns: dict) -> None:
    names = list(columns.keys())
    with open(path, "w") as f:
        for i, t in enumerate(steps):
            fields = [f'"step": {int(t)}'] + [f'"{c}": {fmt17(columns[c][i])}' for c in names]
            f.write("{" + ", ".join(fields) + "}\n")


def config_hash(obj) -> str:
    """Short stable hash of a configuration mapping, for cache-friendly file names."""
    return hashlib.sha256(dumps_json(obj, indent=0).encode()).hexdigest()[:12]
