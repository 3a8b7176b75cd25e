"""JSON file format for operators and tuples, and canonical report output.

Operator document::

    {"symbol": [[k, re, im], ...],
     "compact": {"size": n0, "entries": [[i, j, re, im], ...]}}

Tuple document: ``{"operators": [operator, ...]}``.  A bare operator document
is accepted wherever a tuple is expected and read as a 1-tuple.

Reports are written with sorted keys and every float printed with 17
significant digits, so parsing and re-emitting a report is byte-identical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .errors import FormatError
from .operator import CompactBlock, StructuredOperator
from .optuple import OperatorTuple
from .symbol import LaurentPoly

_number = {"type": "number"}

OPERATOR_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["symbol"],
    "additionalProperties": False,
    "properties": {
        "symbol": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "integer"}, _number, _number],
                "minItems": 3,
                "maxItems": 3,
            },
        },
        "compact": {
            "type": "object",
            "required": ["size", "entries"],
            "additionalProperties": False,
            "properties": {
                "size": {"type": "integer", "minimum": 0},
                "entries": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "prefixItems": [
                            {"type": "integer", "minimum": 0},
                            {"type": "integer", "minimum": 0},
                            _number,
                            _number,
                        ],
                        "minItems": 4,
                        "maxItems": 4,
                    },
                },
            },
        },
    },
}

TUPLE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["operators"],
    "additionalProperties": False,
    "properties": {"operators": {"type": "array", "minItems": 1, "items": OPERATOR_SCHEMA}},
}


def _validate(doc: Any, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        where = "/".join(str(p) for p in error.absolute_path) or "<root>"
        raise FormatError(f"{where}: {error.message}")


def operator_from_json(doc: Any, path: str = "") -> StructuredOperator:
    _validate(doc, OPERATOR_SCHEMA)
    symbol = {}
    for k, re, im in doc["symbol"]:
        symbol[k] = symbol.get(k, 0) + complex(re, im)
    compact = doc.get("compact", {"size": 0, "entries": []})
    n0 = compact["size"]
    block = np.zeros((n0, n0), dtype=complex)
    for pos, (i, j, re, im) in enumerate(compact["entries"]):
        if i >= n0 or j >= n0:
            raise FormatError(f"{path}compact/entries/{pos}: index ({i}, {j}) outside size {n0}")
        block[i, j] += complex(re, im)
    return StructuredOperator(LaurentPoly(symbol), CompactBlock(block))


def tuple_from_json(doc: Any) -> OperatorTuple:
    if isinstance(doc, dict) and "operators" not in doc and "symbol" in doc:
        return OperatorTuple([operator_from_json(doc)])
    _validate(doc, TUPLE_SCHEMA)
    return OperatorTuple(
        operator_from_json(op, f"operators/{i}/") for i, op in enumerate(doc["operators"])
    )


def load_tuple(path: str | Path) -> OperatorTuple:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return tuple_from_json(doc)


def operator_to_json(op: StructuredOperator) -> dict:
    entries = op.compact.entries
    nz = np.argwhere(np.abs(entries) > 0)
    return {
        "symbol": [[k, c.real, c.imag] for k, c in op.symbol.items()],
        "compact": {
            "size": op.compact.size,
            "entries": [
                [int(i), int(j), entries[i, j].real, entries[i, j].imag] for i, j in nz
            ],
        },
    }


def tuple_to_json(t: OperatorTuple) -> dict:
    return {"operators": [operator_to_json(op) for op in t]}


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}"
            for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [f"{pad}{_emit(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj: Any, indent: int = 2) -> str:
    """Sorted keys, 17-significant-digit floats, trailing newline."""
    return _emit(obj, indent, 0) + "\n"
