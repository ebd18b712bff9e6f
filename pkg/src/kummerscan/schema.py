"""JSON Schema (draft 2020-12) for every document the CLI writes.

``scan`` and ``conjecture`` cells carry monotonicity verdicts; ``bounds``
cells carry ``pass``/``fail``; single evaluations (``eval``, ``ratio``,
``derivative``) use ``ok`` and a decimal string value.
"""

from __future__ import annotations

MONOTONE_VERDICTS = ["increasing", "violation", "inconclusive", "vacuous", "skipped_domain", "error"]
BOUNDS_VERDICTS = ["pass", "fail"]

_number = {"type": "number"}
_point = {
    "type": "object",
    "required": ["x", "value"],
    "properties": {"x": _number, "value": _number},
}
_witness = {
    "type": "object",
    "required": ["x", "derivative", "error_bound"],
    "properties": {"x": _number, "derivative": _number, "error_bound": _number},
}

_monotone_cell = {
    "type": "object",
    "required": ["params", "verdict", "witness", "min_derivative", "samples"],
    "properties": {
        "params": {"type": "object"},
        "verdict": {"enum": MONOTONE_VERDICTS},
        "witness": {"oneOf": [_witness, {"type": "null"}]},
        "min_derivative": {"oneOf": [_point, {"type": "null"}]},
        "samples": {"type": "integer", "minimum": 0},
        "error": {"type": ["string", "null"]},
        "report": {"type": ["object", "null"]},
    },
}

_bounds_cell = {
    "type": "object",
    "required": ["params", "verdict", "min_lower_margin", "min_upper_margin", "samples"],
    "properties": {
        "params": {"type": "object", "required": ["n"]},
        "verdict": {"enum": BOUNDS_VERDICTS},
        "min_lower_margin": _point,
        "min_upper_margin": _point,
        "samples": {"type": "integer", "minimum": 1},
        "violations": {"type": "array"},
    },
}

_value_cell = {
    "type": "object",
    "required": ["params", "verdict", "value", "rel_error_bound"],
    "properties": {
        "params": {"type": "object"},
        "verdict": {"const": "ok"},
        "value": {"type": "string"},
        "rel_error_bound": _number,
        "abs_error_bound": _number,
        "defined_by_limit": {"type": "boolean"},
    },
}

_metadata = {
    "type": "object",
    "required": ["precision_bits", "grid_hash", "tool_version"],
    "properties": {
        "precision_bits": {"type": "integer", "minimum": 2},
        "grid_hash": {"type": ["string", "null"]},
        "tool_version": {"type": "string"},
    },
}


def _kind(kinds: list[str], cell: dict) -> dict:
    return {
        "if": {"properties": {"kind": {"enum": kinds}}},
        "then": {"properties": {"cells": {"type": "array", "items": cell}}},
    }


RESULT_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "kummerscan result",
    "type": "object",
    "required": ["schema_version", "kind", "grid", "cells", "metadata"],
    "properties": {
        "schema_version": {"const": 1},
        "kind": {"enum": ["scan", "bounds", "conjecture", "eval", "ratio", "derivative"]},
        "grid": {"type": "object"},
        "cells": {"type": "array"},
        "metadata": _metadata,
    },
    "allOf": [
        _kind(["scan", "conjecture"], _monotone_cell),
        _kind(["bounds"], _bounds_cell),
        _kind(["eval", "ratio", "derivative"], _value_cell),
    ],
}
