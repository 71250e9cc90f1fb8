"""JSON schemas and loaders for bodies, G, phi and instance documents."""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from .bodies import HPolytope, StarBody, body_from_dict
from .errors import InvalidInputError
from .functionals import DiscreteMeasure, GFunction, PhiFunction, g_from_config, phi_from_config
from .solver import FAMILIES, OBJECTIVES, ProblemSpec, make_problem, petty_problem
from .sphere import product_rule

_NUMBER = {"type": "number"}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_VECTOR = {"type": "array", "items": _NUMBER, "minItems": 2}
_MATRIX = {"type": "array", "items": _VECTOR, "minItems": 2}


def _kind(name: str, properties: dict, required=()) -> dict:
    return {
        "type": "object",
        "properties": {"kind": {"const": name}, **properties},
        "required": ["kind", *required],
        "additionalProperties": False,
    }


G_SCHEMA = {
    "oneOf": [
        _kind("power", {"q": _NUMBER, "scale": _POSITIVE}, ["q"]),
        _kind(
            "polynomial",
            {"coefficients": {"type": "array", "items": _POSITIVE, "minItems": 1}, "exponents": {"type": "array", "items": _NUMBER, "minItems": 1}},
            ["coefficients", "exponents"],
        ),
        _kind("exponential", {"scale": _POSITIVE, "rate": _POSITIVE}),
        _kind("weighted_power", {"q": _NUMBER, "scale": _POSITIVE, "axis": _VECTOR, "beta": _NUMBER}, ["q", "axis", "beta"]),
    ]
}

PHI_SCHEMA = {
    "oneOf": [
        _kind("power", {"p": _NUMBER}, ["p"]),
        _kind("texp", {}),
    ]
}


def _body(name: str, parameters: dict, required=()) -> dict:
    return {
        "type": "object",
        "properties": {
            "kind": {"const": name},
            "dimension": {"type": "integer", "minimum": 2},
            "parameters": {"type": "object", "properties": parameters, "required": list(required), "additionalProperties": False},
        },
        "required": ["kind", "dimension", "parameters"],
        "additionalProperties": False,
    }


_POLYTOPE_PARAMS = {"normals": _MATRIX, "offsets": {"type": "array", "items": _POSITIVE, "minItems": 3}}

BODY_SCHEMA = {
    "$defs": {
        "body": {
            "oneOf": [
                _body("ball", {"radius": _POSITIVE}),
                _body("ellipsoid", {"semiaxes": {"type": "array", "items": _POSITIVE, "minItems": 2}, "rotation": _MATRIX}, ["semiaxes"]),
                _body("cone", {"R": _POSITIVE, "r": _POSITIVE, "axis": _VECTOR}, ["R", "r", "axis"]),
                _body("polytope", _POLYTOPE_PARAMS, ["normals", "offsets"]),
                _body("polar_polytope", _POLYTOPE_PARAMS, ["normals", "offsets"]),
                _body("scaled", {"body": {"$ref": "#/$defs/body"}, "factor": _POSITIVE}, ["body", "factor"]),
                _body("support_average", {"first": {"$ref": "#/$defs/body"}, "second": {"$ref": "#/$defs/body"}}, ["first", "second"]),
            ]
        }
    },
    "$ref": "#/$defs/body",
}

ATOMS_SCHEMA = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "properties": {"u": _VECTOR, "lambda": _POSITIVE},
        "required": ["u", "lambda"],
        "additionalProperties": False,
    },
}

INSTANCE_SCHEMA = {
    "type": "object",
    "properties": {
        "dimension": {"type": "integer", "minimum": 2, "maximum": 6},
        "atoms": ATOMS_SCHEMA,
        "phi": PHI_SCHEMA,
        "g": G_SCHEMA,
        "family": {"enum": list(FAMILIES)},
        "objective": {"enum": list(OBJECTIVES)},
        "petty_reference": _body("polytope", _POLYTOPE_PARAMS, ["normals", "offsets"]),
        "resolution": {"type": "integer", "minimum": 2},
        "seed": {"type": "integer", "minimum": 0},
    },
    "required": ["dimension", "phi", "g"],
    "anyOf": [{"required": ["atoms"]}, {"required": ["petty_reference"]}],
    "additionalProperties": False,
}

# Measures for the orlicz-norm functional: atoms plus optional h values.
MEASURE_SCHEMA = {
    "type": "object",
    "properties": {"atoms": ATOMS_SCHEMA, "h": {"type": "array", "items": _POSITIVE}},
    "required": ["atoms"],
    "additionalProperties": False,
}


def check(doc, schema: dict, what: str) -> None:
    """Validate ``doc`` against ``schema``; raise InvalidInputError on failure."""
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidInputError(f"{what} failed schema validation at {where}: {exc.message}") from None


def read_json(source: str):
    """Parse inline JSON text, or the contents of the file it names."""
    text = source
    path = Path(source)
    if not source.lstrip().startswith(("{", "[")):
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InvalidInputError(f"cannot read {source}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON in {source}: {exc}") from None


def load_g(doc: dict, dimension: int) -> GFunction:
    check(doc, G_SCHEMA, "g")
    return g_from_config(doc, dimension)


def load_phi(doc: dict) -> PhiFunction:
    check(doc, PHI_SCHEMA, "phi")
    return phi_from_config(doc)


def load_body(doc: dict) -> StarBody:
    check(doc, BODY_SCHEMA, "body")
    return body_from_dict(doc)


def load_measure(doc: dict, dimension: int | None = None) -> tuple[DiscreteMeasure, np.ndarray | None]:
    check(doc, MEASURE_SCHEMA, "measure")
    measure = _atoms_measure(doc["atoms"], dimension)
    h = doc.get("h")
    if h is not None and len(h) != len(measure):
        raise InvalidInputError("measure h values must match the number of atoms")
    return measure, None if h is None else np.asarray(h, dtype=float)


def _atoms_measure(atoms: list, dimension: int | None) -> DiscreteMeasure:
    u = [a["u"] for a in atoms]
    if len({len(x) for x in u}) != 1 or (dimension is not None and len(u[0]) != dimension):
        raise InvalidInputError("every atom direction must have the declared dimension")
    return DiscreteMeasure(u, [a["lambda"] for a in atoms])


def load_instance(doc: dict) -> ProblemSpec:
    """Schema-check an instance document and build the (validated) problem."""
    check(doc, INSTANCE_SCHEMA, "instance")
    n = doc["dimension"]
    g = load_g(doc["g"], n)
    phi = load_phi(doc["phi"])
    rule = product_rule(n, doc.get("resolution"))
    family = doc.get("family", "Btilde")
    objective = doc.get("objective", "integral")
    seed = doc.get("seed")
    if "petty_reference" in doc:
        ref = body_from_dict(doc["petty_reference"])
        assert isinstance(ref, HPolytope)
        if ref.dimension != n:
            raise InvalidInputError("petty_reference dimension does not match the instance")
        if "atoms" in doc:
            spec = make_problem(_atoms_measure(doc["atoms"], n), phi, g, family, objective, rule, ref, seed)
        else:
            spec = petty_problem(ref, phi, g, family, objective, rule, seed)
    else:
        spec = make_problem(_atoms_measure(doc["atoms"], n), phi, g, family, objective, rule, None, seed)
    spec.validate()
    return spec
