"""Canonical JSON output: sorted keys, 17 significant digits, complex as [re, im]."""

from __future__ import annotations

import json
import math

import numpy as np


def to_plain(x):
    """Recursively convert numpy and complex values into JSON-ready Python objects."""
    if hasattr(x, "to_json") and not isinstance(x, type):
        return to_plain(x.to_json())
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def _float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == 0:
        return "0.0"
    text = format(x, ".17g")
    # keep a float marker so the value parses back as a float
    return text if ("e" in text or "." in text) else text + ".0"


def _emit(x, indent: int | None, level: int) -> str:
    if isinstance(x, float):
        return _float(x)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [json.dumps(k) + ": " + _emit(x[k], indent, level + 1) for k in sorted(x)]
        return _join("{", "}", items, indent, level)
    if isinstance(x, list):
        if not x:
            return "[]"
        return _join("[", "]", [_emit(v, indent, level + 1) for v in x], indent, level)
    return json.dumps(x)


def _join(open_, close, items, indent, level):
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (level + 1))
    return open_ + "\n" + ",\n".join(pad + s for s in items) + "\n" + " " * (indent * level) + close


def dumps(obj, indent: int | None = 2) -> str:
    """Deterministic JSON text for ``obj``."""
    return _emit(to_plain(obj), indent, 0)
