"""Deterministic JSON serialization.

Floats are rendered with 17 significant digits, which round-trips every IEEE
double exactly and keeps persisted files byte-identical across runs. Reading
uses the standard library parser.
"""

import json
from typing import Any

import numpy as np


def format_float(value: float) -> str:
    """Render a float with 17 significant digits (exact double round-trip)."""
    return format(float(value), ".17g")


def _encode(obj: Any, parts: list) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(format_float(obj))
    elif isinstance(obj, np.ndarray):
        _encode(obj.tolist(), parts)
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                parts.append(", ")
            parts.append(json.dumps(str(key)))
            parts.append(": ")
            _encode(value, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, value in enumerate(obj):
            if i:
                parts.append(", ")
            _encode(value, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(document: dict) -> str:
    parts: list = []
    _encode(document, parts)
    parts.append("\n")
    return "".join(parts)


def write_document(document: dict, path) -> None:
    text = dumps(document)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def read_document(path) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)
