"""Deterministic artifact writers and the JSON schemas they satisfy.

All floats are rendered with Python's shortest round-trip representation,
and every file is written to a temporary sibling then atomically renamed,
so identical configurations yield byte-identical artifacts.
"""

from __future__ import annotations

import json
import os
import tempfile


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return repr(float(value))


def write_text_atomic(path, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def _plain(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path, obj):
    write_text_atomic(path, json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")


def write_jsonl(path, rows):
    lines = [json.dumps(_plain(r), sort_keys=True) for r in rows]
    write_text_atomic(path, "\n".join(lines) + ("\n" if lines else ""))


_CHECK_SCHEMA = {
    "type": "object",
    "required": ["check_id", "passed", "max_violation", "at", "tolerance", "notes"],
    "properties": {
        "check_id": {"type": "string"},
        "passed": {"type": "boolean"},
        "max_violation": {"type": "number"},
        "at": {"type": ["number", "integer", "null"]},
        "tolerance": {"type": "number"},
        "notes": {"type": "string"},
    },
    "additionalProperties": False,
}

_PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["id", "dim", "L", "fstar", "argmin_kind"],
    "properties": {
        "id": {"type": "string"},
        "dim": {"type": "integer"},
        "L": {"type": "number"},
        "fstar": {"type": "number"},
        "argmin_kind": {"enum": ["single_point", "bounded_set", "unbounded_set"]},
        "minimizers": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    },
}

_FAILURE_SCHEMA = {
    "oneOf": [
        {"type": "null"},
        {
            "type": "object",
            "required": ["message"],
            "properties": {"message": {"type": "string"}, "at": {"type": ["number", "null"]}},
        },
    ]
}

SCHEMAS = {
    "report": {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "required": ["command", "params", "problem", "checks", "passed", "failure"],
        "properties": {
            "command": {"enum": ["method-run", "ode-run"]},
            "params": {"type": "object"},
            "problem": _PROBLEM_SCHEMA,
            "terminal": {"type": "object"},
            "step_stats": {"type": "object"},
            "checks": {"type": "array", "items": _CHECK_SCHEMA},
            "passed": {"type": "boolean"},
            "failure": _FAILURE_SCHEMA,
        },
    },
    "events": {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "array",
        "items": {
            "type": "object",
            "required": ["t", "kind", "velocity"],
            "properties": {
                "t": {"type": "number"},
                "kind": {
                    "enum": [
                        "enter_flat_from_right",
                        "exit_flat_left",
                        "enter_flat_from_left",
                        "exit_flat_right",
                    ]
                },
                "velocity": {"type": "number"},
            },
            "additionalProperties": False,
        },
    },
    "snapshot_line": {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "required": ["k", "x"],
        "properties": {
            "k": {"type": "integer"},
            "x": {"type": "array", "items": {"type": "number"}},
        },
        "additionalProperties": False,
    },
    "verify": {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "required": ["budget", "filter", "checks", "counts", "passed"],
        "properties": {
            "budget": {"enum": ["quick", "full"]},
            "filter": {"type": ["string", "null"]},
            "checks": {"type": "array", "items": _CHECK_SCHEMA},
            "counts": {
                "type": "object",
                "required": ["passed", "failed"],
                "properties": {"passed": {"type": "integer"}, "failed": {"type": "integer"}},
            },
            "passed": {"type": "boolean"},
        },
    },
    "catalog": {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "array",
        "items": {
            "type": "object",
            "required": ["id", "kind", "params", "L", "fstar", "minimizers"],
            "properties": {
                "id": {"type": "string"},
                "kind": {"type": "string"},
                "params": {"type": "object"},
                "L": {"type": "number"},
                "fstar": {"type": "number"},
                "minimizers": {"type": "array"},
            },
        },
    },
}
