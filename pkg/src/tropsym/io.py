"""JSON (de)serialization and the bundled fixture models.

Rationals are written as ``"num/den"`` strings in lowest terms; integers stay
bare.  Parsing validates structure with JSON Schema first, so malformed input
is reported with the path of the offending field.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from importlib import resources
from typing import Any

import jsonschema

from .chipfiring import DivisorClass
from .core import Divisor, Model, Point
from .sympow import CellPoint, SymPowComplex, StableCell, f_vector

__all__ = [
    "SchemaError",
    "format_rational",
    "parse_rational",
    "model_to_json",
    "model_from_json",
    "point_to_json",
    "point_from_json",
    "divisor_to_json",
    "divisor_from_json",
    "class_to_json",
    "complex_to_json",
    "cellpoint_to_json",
    "dumps",
    "load_json",
    "load_model",
    "fixture",
    "FIXTURES",
]

FIXTURES = ("interval", "circle", "dumbbell", "chain_g2", "chain_g3")

_RATIONAL = r"^-?[0-9]+(/[0-9]+)?$"

MODEL_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "properties": {
                    "id": {"type": "string"},
                    "weight": {"type": "integer", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "tail", "head", "length"],
                "properties": {
                    "id": {"type": "string"},
                    "tail": {"type": "string"},
                    "head": {"type": "string"},
                    "length": {"type": "string", "pattern": _RATIONAL},
                },
                "additionalProperties": False,
            },
        },
    },
}

POINT_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "required": ["vertex"],
            "properties": {"vertex": {"type": "string"}},
            "additionalProperties": False,
        },
        {
            "type": "object",
            "required": ["edge", "pos"],
            "properties": {
                "edge": {"type": "string"},
                "pos": {"type": "string", "pattern": _RATIONAL},
            },
            "additionalProperties": False,
        },
    ]
}

DIVISOR_SCHEMA = {
    "type": "object",
    "required": ["terms"],
    "properties": {
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["at", "coeff"],
                "properties": {"at": POINT_SCHEMA, "coeff": {"type": "integer"}},
                "additionalProperties": False,
            },
        },
    },
}

CLASS_SCHEMA = {
    "type": "object",
    "required": ["representative"],
    "properties": {
        "base": POINT_SCHEMA,
        "degree": {"type": "integer"},
        "representative": DIVISOR_SCHEMA,
    },
}

COMPLEX_SCHEMA = {
    "type": "object",
    "required": ["d", "f_vector", "cells"],
    "properties": {
        "d": {"type": "integer", "minimum": 0},
        "f_vector": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "dim", "vertex_weights", "edge_sequences", "shape", "faces"],
                "properties": {
                    "id": {"type": "string"},
                    "dim": {"type": "integer", "minimum": 0},
                    "vertex_weights": {"type": "object",
                                       "additionalProperties": {"type": "integer", "minimum": 0}},
                    "edge_sequences": {"type": "object",
                                       "additionalProperties": {"type": "array",
                                                                "items": {"type": "integer", "minimum": 1}}},
                    "shape": {"type": "array", "items": {
                        "type": "object", "required": ["k", "a"],
                        "properties": {"k": {"type": "integer", "minimum": 0},
                                       "a": {"type": "string", "pattern": _RATIONAL}}}},
                    "faces": {"type": "array", "items": {
                        "type": "object", "required": ["cell", "zeroed"],
                        "properties": {"cell": {"type": "string"},
                                       "zeroed": {"type": "array", "items": {"type": "integer"}}}}},
                },
            },
        },
    },
}


class SchemaError(ValueError):
    """Malformed JSON input; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path or '<root>'}: {message}")
        self.message = message
        self.path = path


def _check(data, schema, where=""):
    validator = jsonschema.Draft202012Validator(schema)
    err = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if err is not None:
        path = "/".join(str(p) for p in err.absolute_path)
        if where:
            path = f"{where}/{path}" if path else where
        raise SchemaError(err.message, path)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s: str, path: str = "") -> Fraction:
    if isinstance(s, int) and not isinstance(s, bool):
        return Fraction(s)
    if not isinstance(s, str) or not re.match(_RATIONAL, s):
        raise SchemaError(f"{s!r} is not a rational of the form num/den", path)
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise SchemaError("zero denominator", path) from None


# -- models
def model_to_json(m: Model) -> dict:
    return {
        "vertices": [{"id": v, "weight": m.weights[v]} for v in m.vertices],
        "edges": [{"id": e.id, "tail": e.tail, "head": e.head, "length": format_rational(e.length)}
                  for e in m.edges],
    }


def model_from_json(data: Any) -> Model:
    _check(data, MODEL_SCHEMA)
    vertices = [v["id"] for v in data["vertices"]]
    weights = {v["id"]: v.get("weight", 0) for v in data["vertices"]}
    edges = [(e["id"], e["tail"], e["head"], parse_rational(e["length"], f"edges/{i}/length"))
             for i, e in enumerate(data["edges"])]
    return Model(vertices, weights, edges)


# -- points and divisors
def point_to_json(p: Point) -> dict:
    if p.vertex is not None:
        return {"vertex": p.vertex}
    return {"edge": p.edge, "pos": format_rational(p.pos)}


def point_from_json(data: Any, path: str = "") -> Point:
    _check(data, POINT_SCHEMA, path)
    if "vertex" in data:
        return Point(vertex=data["vertex"])
    return Point(edge=data["edge"], pos=parse_rational(data["pos"], f"{path}/pos"))


def divisor_to_json(D: Divisor) -> dict:
    return {"terms": [{"at": point_to_json(p), "coeff": c} for p, c in D.terms.items()]}


def divisor_from_json(data: Any, host: Model) -> Divisor:
    _check(data, DIVISOR_SCHEMA)
    terms = [(point_from_json(t["at"], f"terms/{i}/at"), t["coeff"]) for i, t in enumerate(data["terms"])]
    return Divisor(host, terms)


def class_to_json(c: DivisorClass) -> dict:
    return {"base": point_to_json(c.base), "degree": c.degree,
            "representative": divisor_to_json(c.representative)}


def class_from_json(data: Any, host: Model) -> Divisor:
    """Accept either a class object or a bare divisor; return a representative."""
    if isinstance(data, dict) and "representative" in data:
        _check(data, CLASS_SCHEMA)
        return divisor_from_json(data["representative"], host)
    return divisor_from_json(data, host)


# -- complexes
def _cell_json(c: SymPowComplex, cell: StableCell) -> dict:
    return {
        "id": cell.id,
        "dim": cell.dim,
        "vertex_weights": {v: w for v, w in cell.vertex_weights},
        "edge_sequences": {e: list(s) for e, s in cell.sequences},
        "shape": [{"k": k, "a": format_rational(a)} for k, a in cell.shape.factors],
        "faces": [{"cell": f.cell, "zeroed": list(f.zeroed)} for f in c.faces.get(cell.id, ())],
    }


def complex_to_json(c: SymPowComplex) -> dict:
    return {"d": c.d, "f_vector": f_vector(c), "cells": [_cell_json(c, cell) for cell in c.cells]}


def validate_complex_json(data: Any) -> None:
    _check(data, COMPLEX_SCHEMA)


def cellpoint_to_json(p: CellPoint) -> dict:
    return {"cell": p.cell_id,
            "coordinates": {e: [format_rational(x) for x in xs] for e, xs in p.coordinates}}


# -- files
def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def load_json(path: str):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None


def fixture(name: str) -> Model:
    """Load one of the bundled models listed in ``FIXTURES``."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("tropsym").joinpath("data", f"{name}.json").read_text()
    return model_from_json(json.loads(text))


def load_model(spec: str) -> Model:
    """Load a model from a path, or a bundled one via ``fixture:NAME``."""
    if spec.startswith("fixture:"):
        return fixture(spec.split(":", 1)[1])
    return model_from_json(load_json(spec))
