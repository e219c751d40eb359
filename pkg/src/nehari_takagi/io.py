"""JSON file formats: problem input, resolvent export, Schur parameters.

Complex numbers are two-element arrays ``[re, im]``; matrices are row-major
lists of rows. Plain real numbers are also accepted on input. Floats are
written with 17 significant digits so output is reproducible byte for byte.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .errors import DimensionMismatch, ProblemFileError
from .nehari import SchurParameter
from .realization import Realization
from .resolvent import GammaGeneratingMatrix, ResolventData

RESOLVENT_FORMAT = "nehari-takagi-resolvent"
RESOLVENT_VERSION = 1

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_MATRIX = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": _COMPLEX},
}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Nehari-Takagi problem",
    "type": "object",
    "required": ["A", "B", "C", "kappa"],
    "properties": {
        "A": _MATRIX,
        "B": _MATRIX,
        "C": _MATRIX,
        "kappa": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "tolerances": {
            "type": "object",
            "properties": {
                "tol_rank": {"type": "number", "exclusiveMinimum": 0},
                "tol_inertia": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

EPSILON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Schur parameter",
    "type": "object",
    "required": ["kind", "value"],
    "properties": {
        "kind": {"enum": ["constant", "blaschke_scaled"]},
        "value": _MATRIX,
        "zeros": {"type": "array", "items": _COMPLEX},
    },
    "additionalProperties": False,
}

_RESOLVENT_MATRICES = ("A", "B", "C", "M", "N", "Lambda", "Lambda_inv", "G1_star")

RESOLVENT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Nehari-Takagi resolvent export",
    "type": "object",
    "required": ["format", "version", "dims", "kappa1", *_RESOLVENT_MATRICES],
    "properties": {
        "format": {"const": RESOLVENT_FORMAT},
        "version": {"const": RESOLVENT_VERSION},
        "dims": {
            "type": "object",
            "required": ["n", "p", "q", "m"],
            "properties": {k: {"type": "integer", "minimum": 1} for k in "npqm"},
        },
        "kappa1": {"type": "integer", "minimum": 0},
        "diagnostics": {"type": "object"},
        **{k: _MATRIX for k in _RESOLVENT_MATRICES},
    },
}


@dataclass(frozen=True)
class ProblemFile:
    realization: Realization
    kappa: int
    seed: int | None = None
    tolerances: dict = field(default_factory=dict)


def _field_path(error: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in error.absolute_path]
    return "/".join(parts) if parts else "<root>"


def _load_json(path, schema) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFileError(f"{path}: cannot read: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    validator = jsonschema.Draft202012Validator(schema)
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        raise ProblemFileError(f"{path}: field {_field_path(error)}: {error.message}")
    return data


def decode_complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    return complex(x[0], x[1])


def decode_matrix(rows, name: str = "matrix") -> np.ndarray:
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ProblemFileError(f"field {name}: rows have different lengths {sorted(widths)}")
    return np.array([[decode_complex(x) for x in row] for row in rows], dtype=complex)


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(a) -> list:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    return [[encode_complex(x) for x in row] for row in a]


def load_problem(path) -> ProblemFile:
    data = _load_json(path, PROBLEM_SCHEMA)
    mats = {k: decode_matrix(data[k], k) for k in ("A", "B", "C")}
    try:
        r = Realization(mats["A"], mats["B"], mats["C"])
    except DimensionMismatch as exc:
        raise ProblemFileError(f"{path}: {exc}") from exc
    return ProblemFile(r, int(data["kappa"]), data.get("seed"), dict(data.get("tolerances", {})))


def problem_to_dict(r: Realization, kappa: int, seed: int | None = None) -> dict:
    out = {"A": encode_matrix(r.A), "B": encode_matrix(r.B), "C": encode_matrix(r.C),
           "kappa": int(kappa)}
    if seed is not None:
        out["seed"] = int(seed)
    return out


def load_epsilon(path) -> SchurParameter:
    data = _load_json(path, EPSILON_SCHEMA)
    value = decode_matrix(data["value"], "value")
    zeros = tuple(decode_complex(z) for z in data.get("zeros", []))
    if data["kind"] == "constant" and zeros:
        raise ProblemFileError(f"{path}: field zeros: not allowed for a constant parameter")
    if data["kind"] == "blaschke_scaled" and not zeros:
        raise ProblemFileError(f"{path}: field zeros: required for blaschke_scaled")
    try:
        return SchurParameter(value, zeros)
    except ValueError as exc:
        raise ProblemFileError(f"{path}: field value: {exc}") from exc


def epsilon_to_dict(eps: SchurParameter) -> dict:
    out = {"kind": eps.kind, "value": encode_matrix(eps.value)}
    if eps.zeros:
        out["zeros"] = [encode_complex(z) for z in eps.zeros]
    return out


def resolvent_to_dict(G: GammaGeneratingMatrix | ResolventData) -> dict:
    rd = G.data if isinstance(G, GammaGeneratingMatrix) else G
    out = {
        "format": RESOLVENT_FORMAT,
        "version": RESOLVENT_VERSION,
        "dims": {"n": rd.n, "p": rd.p, "q": rd.q, "m": rd.m},
        "kappa1": rd.kappa1,
    }
    for k in _RESOLVENT_MATRICES:
        out[k] = encode_matrix(getattr(rd, k))
    out["diagnostics"] = dict(rd.diagnostics)
    return out


def load_resolvent(path) -> GammaGeneratingMatrix:
    data = _load_json(path, RESOLVENT_SCHEMA)
    mats = {k: decode_matrix(data[k], k) for k in _RESOLVENT_MATRICES}
    dims = data["dims"]
    n, p, q = dims["n"], dims["p"], dims["q"]
    expected = {
        "A": (n, n), "B": (n, q), "C": (p, n), "M": (2 * n, 2 * n), "N": (2 * n, 2 * n),
        "Lambda": (2 * n, 2 * n), "Lambda_inv": (2 * n, 2 * n), "G1_star": (2 * n, p + q),
    }
    for k, shape in expected.items():
        if mats[k].shape != shape:
            raise ProblemFileError(f"{path}: field {k}: shape {mats[k].shape}, expected {shape}")
    if dims["m"] != p + q:
        raise ProblemFileError(f"{path}: field dims/m: must equal p + q")
    rd = ResolventData.from_matrices(
        mats["A"], mats["B"], mats["C"], mats["Lambda"], data["kappa1"],
        mats["Lambda_inv"], data.get("diagnostics"),
    )
    for k in ("M", "N", "G1_star"):
        if not np.allclose(getattr(rd, k), mats[k], rtol=1e-12, atol=1e-12):
            raise ProblemFileError(f"{path}: field {k}: inconsistent with A, B, C")
    return GammaGeneratingMatrix(rd)


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits; keys keep insertion order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps(encode_complex(obj), indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool)
               for x in obj):
            return "[" + ", ".join(dumps(x) for x in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory and rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
