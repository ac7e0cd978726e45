"""JSON file formats.

Matrix file::

    {"n": 2, "data": [[2, 1], [1, 2]]}

Spectrum file (the full conjugate-closed list)::

    {"values": [{"re": -1, "im": 2}, {"re": -1, "im": -2}]}

Output is byte-stable: keys keep insertion order and floats use Python's
shortest round-trip ``repr``.
"""

from __future__ import annotations

import json
import math
from numbers import Real
from pathlib import Path

import numpy as np

from .errors import OddLength, ValidationError

__all__ = [
    "read_matrix",
    "read_spectrum",
    "write_json",
    "dumps",
    "matrix_to_json",
    "complex_to_json",
    "to_jsonable",
]


def _is_number(x) -> bool:
    return isinstance(x, Real) and not isinstance(x, bool)


def _load(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def parse_matrix(obj, source="matrix") -> np.ndarray:
    if not isinstance(obj, dict) or "n" not in obj or "data" not in obj:
        raise ValidationError(f"{source}: expected an object with keys 'n' and 'data'")
    n, data = obj["n"], obj["data"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"{source}: 'n' must be a positive integer")
    if not isinstance(data, list) or len(data) != n:
        raise ValidationError(f"{source}: 'data' must hold {n} rows")
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"{source}: row {i} must hold {n} entries")
        for x in row:
            if not _is_number(x) or not math.isfinite(x):
                raise ValidationError(f"{source}: row {i} has a non-finite or non-numeric entry {x!r}")
    return np.array(data, dtype=float)


def parse_spectrum(obj, source="spectrum") -> list:
    if not isinstance(obj, dict) or not isinstance(obj.get("values"), list):
        raise ValidationError(f"{source}: expected an object with a 'values' list")
    out = []
    for i, v in enumerate(obj["values"]):
        if not isinstance(v, dict) or not all(_is_number(v.get(key)) for key in ("re", "im")):
            raise ValidationError(f"{source}: value {i} must be an object with numeric 're' and 'im'")
        if not (math.isfinite(v["re"]) and math.isfinite(v["im"])):
            raise ValidationError(f"{source}: value {i} is not finite")
        out.append(complex(v["re"], v["im"]))
    if len(out) % 2:
        raise OddLength(f"{source}: a conjugate-closed spectrum has even length, got {len(out)}")
    return out


def read_matrix(path) -> np.ndarray:
    return parse_matrix(_load(path), str(path))


def read_spectrum(path) -> list:
    return parse_spectrum(_load(path), str(path))


def complex_to_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=float)
    return {"n": int(a.shape[0]), "data": [[float(x) for x in row] for row in a]}


def to_jsonable(obj):
    """Recursively convert numpy and complex values into JSON-ready builtins."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))
