"""Deterministic JSON / CSV serialisation and input loading."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

FLOAT_FORMAT = ".17g"


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, FLOAT_FORMAT)


def plain(obj):
    """Convert numpy scalars/arrays and tuples into plain Python containers."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(k) + ": " + _encode(obj[k], indent, level + 1)
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON with sorted keys and every float printed to 17 significant digits."""
    return _encode(plain(obj), indent, 0) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj), encoding="utf-8")


def write_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow([_fmt_float(v).strip('"') if isinstance(v, float) else v for v in row])


def parse_floats(text: str) -> np.ndarray:
    """``"1, 0.5, 0.25"`` -> array; ``inf`` accepted."""
    parts = [p for p in text.replace(";", ",").replace(" ", ",").split(",") if p]
    return np.array([float(p) for p in parts], dtype=np.float64)


def load_vector(spec: str) -> np.ndarray:
    """A vector given inline (comma separated) or as a .csv / .json file."""
    path = Path(spec)
    if path.suffix.lower() in (".csv", ".json", ".txt") and path.exists():
        if path.suffix.lower() == ".json":
            return np.asarray(json.loads(path.read_text()), dtype=np.float64).ravel()
        with open(path, newline="") as fh:
            vals = [float(cell) for row in csv.reader(fh) for cell in row if cell.strip()]
        return np.asarray(vals, dtype=np.float64)
    return parse_floats(spec)


def load_matrix(spec: str) -> np.ndarray:
    """A matrix from row-major CSV, a JSON nested array, or inline ``"1,2;3,4"``."""
    path = Path(spec)
    if path.exists():
        if path.suffix.lower() == ".json":
            return np.asarray(json.loads(path.read_text()), dtype=np.float64)
        with open(path, newline="") as fh:
            rows = [[float(c) for c in row] for row in csv.reader(fh) if row]
        return np.asarray(rows, dtype=np.float64)
    rows = [r for r in spec.split(";") if r.strip()]
    return np.asarray([[float(c) for c in r.split(",")] for r in rows], dtype=np.float64)
