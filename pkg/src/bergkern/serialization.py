"""Deterministic JSON and CSV output plus the published JSON schemas.

Floats are written with 17 significant digits so every value round-trips
exactly.  Non-finite values become the strings ``"-inf"``, ``"inf"`` and
``"nan"``.  The ``timing`` key is always written on a single line, which
keeps everything that varies between identical runs in one place.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from typing import Any

import jsonschema

from ._version import __version__

SCHEMA_VERSION = 1
TIMING_KEY = "timing"


def fmt(x: float) -> str:
    """17 significant digits, or a literal for non-finite values."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _scalar(x: Any) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return fmt(x) if math.isfinite(x) else json.dumps(fmt(x))
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if hasattr(x, "item"):  # numpy scalars
        return _scalar(x.item())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _encode(x: Any, indent: int, level: int, compact: bool) -> str:
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [(json.dumps(str(k), ensure_ascii=False), k, v) for k, v in x.items()]
        if compact:
            return "{" + ", ".join(f"{ks}: {_encode(v, indent, level, True)}" for ks, _, v in items) + "}"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(f"{pad}{ks}: {_encode(v, indent, level + 1, k == TIMING_KEY)}" for ks, k, v in items)
        return "{\n" + body + "\n" + " " * (indent * level) + "}"
    if isinstance(x, (list, tuple)):
        if not x:
            return "[]"
        if compact or all(not isinstance(v, (dict, list, tuple)) for v in x):
            return "[" + ", ".join(_encode(v, indent, level, True) for v in x) + "]"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(pad + _encode(v, indent, level + 1, False) for v in x)
        return "[\n" + body + "\n" + " " * (indent * level) + "]"
    return _scalar(x)


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0, False) + "\n"


def loads(text: str) -> Any:
    """Parse JSON written by :func:`dumps`.  Non-finite strings stay strings."""
    return json.loads(text)


def write_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def strip_timing(obj: Any) -> Any:
    """Copy without any ``timing`` keys, for reproducibility comparisons."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != TIMING_KEY}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


# ---------------------------------------------------------------- CSV


def flatten(obj: Any, prefix: str = "") -> dict[str, Any]:
    """Dotted-key view of nested JSON; list items are indexed by position."""
    out: dict[str, Any] = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            out.update(flatten(v, f"{prefix}.{i}" if prefix else str(i)))
    else:
        out[prefix] = obj
    return out


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def csv_text(rows: list[dict[str, Any]]) -> str:
    """Rows of flattened records; the header is the ordered union of keys."""
    flat = [flatten(r) for r in rows]
    header: list[str] = []
    for r in flat:
        header.extend(k for k in r if k not in header)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in flat:
        w.writerow([_cell(r.get(k)) for k in header])
    return buf.getvalue()


# ---------------------------------------------------------------- schemas and documents

_NUMBER = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}

CHECK_REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "CheckReport",
    "type": "object",
    "required": ["name", "statement", "inputs", "quantities", "margins", "tolerance", "passed", "seed"],
    "properties": {
        "name": {"type": "string"},
        "statement": {"type": "string"},
        "inputs": {"type": "object"},
        "quantities": {"type": "array", "items": {
            "type": "object", "required": ["label", "value", "error"],
            "properties": {"label": {"type": "string"}, "value": _NUMBER, "error": _NUMBER}}},
        "margins": {"type": "array", "items": {
            "type": "object", "required": ["label", "value", "terms", "scale", "absolute"],
            "properties": {
                "label": {"type": "string"}, "value": _NUMBER,
                "terms": {"type": "array", "items": {
                    "type": "array", "prefixItems": [{"type": "number"}, {"type": "string"}],
                    "minItems": 2, "maxItems": 2}},
                "scale": {"type": ["string", "null"]}, "absolute": {"type": "boolean"}}}},
        "tolerance": {"type": "number", "minimum": 0},
        "passed": {"type": "boolean"},
        "seed": {"type": "integer", "minimum": 0},
        "notes": {"type": "array", "items": {"type": "string"}},
        "timing": {"type": "object"},
    },
}

REPORT_DOCUMENT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ReportDocument",
    "type": "object",
    "required": ["schema_version", "tool_version", "config", "results", "timing"],
    "properties": {
        "schema_version": {"type": "integer", "minimum": 1},
        "tool_version": {"type": "string"},
        "config": {"type": "object"},
        "summary": {"type": "object"},
        "results": {"type": "array", "items": CHECK_REPORT_SCHEMA},
        "timing": {"type": "object"},
    },
}


def validate_check_report(doc: Any) -> None:
    jsonschema.validate(doc, CHECK_REPORT_SCHEMA)


def validate_document(doc: Any) -> None:
    jsonschema.validate(doc, REPORT_DOCUMENT_SCHEMA)


def report_document(config: dict[str, Any], results: list[dict[str, Any]], runtime_ms: int,
                    timestamp: str | None = None) -> dict[str, Any]:
    """Versioned envelope; the timestamp and runtime live under ``timing`` only."""
    n_passed = sum(bool(r.get("passed")) for r in results)
    ts = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": config,
        "summary": {"n_checks": len(results), "n_passed": n_passed,
                    "n_failed": len(results) - n_passed, "passed": n_passed == len(results)},
        "results": results,
        TIMING_KEY: {"runtime_ms": int(runtime_ms), "timestamp": ts},
    }
