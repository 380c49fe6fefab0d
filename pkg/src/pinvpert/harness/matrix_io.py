"""MatrixFile format: ``{"rows": m, "cols": n, "complex": bool, "data": [...]}``.

``data`` is row-major; complex entries are ``[re, im]`` pairs. Floats are
written with Python's shortest round-trip repr, so read after write returns
bit-identical values.
"""

import json
import math
from pathlib import Path

import numpy as np
import orjson

from ..errors import ParseError
from ..linalg_core import as_mat


def matrix_to_dict(A):
    A = as_mat(A)
    m, n = A.shape
    flat = A.reshape(-1)
    if np.iscomplexobj(A):
        data = np.stack([flat.real, flat.imag], axis=1).tolist()
    else:
        data = flat.tolist()
    return {"rows": m, "cols": n, "complex": bool(np.iscomplexobj(A)), "data": data}


def _field(obj, key, kind, where):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", f"{where}.{key}")
    val = obj[key]
    ok = isinstance(val, kind) and not (kind is int and isinstance(val, bool))
    if not ok:
        raise ParseError(f"field {key!r} has type {type(val).__name__}", f"{where}.{key}")
    return val


def _real(x, loc):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {type(x).__name__}", loc)
    x = float(x)
    if not math.isfinite(x):
        raise ParseError("non-finite value", loc)
    return x


def matrix_from_dict(obj, where="matrix"):
    """Validate a parsed MatrixFile object and return the array."""
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object", where)
    m = _field(obj, "rows", int, where)
    n = _field(obj, "cols", int, where)
    is_complex = _field(obj, "complex", bool, where)
    data = _field(obj, "data", list, where)
    if m < 0 or n < 0:
        raise ParseError("negative shape", f"{where}.rows/cols")
    if len(data) != m * n:
        raise ParseError(f"data has {len(data)} entries, expected rows*cols = {m * n}", f"{where}.data")
    if is_complex:
        out = np.empty(m * n, dtype=np.complex128)
        for i, z in enumerate(data):
            if not (isinstance(z, list) and len(z) == 2):
                raise ParseError("complex entry must be [re, im]", f"{where}.data[{i}]")
            out[i] = complex(_real(z[0], f"{where}.data[{i}][0]"), _real(z[1], f"{where}.data[{i}][1]"))
    else:
        out = np.array([_real(x, f"{where}.data[{i}]") for i, x in enumerate(data)], dtype=np.float64)
    return out.reshape(m, n)


def read_matrix(path):
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:line {exc.lineno} col {exc.colno}") from exc
    return matrix_from_dict(obj, str(path))


def dumps_matrix(A):
    """MatrixFile text for `A` (orjson writes shortest round-trip floats)."""
    return orjson.dumps(matrix_to_dict(A)).decode() + "\n"


def write_matrix(path, A):
    Path(path).write_text(dumps_matrix(A))


def io_matrix(path, direction="read", A=None):
    """Read or write a MatrixFile; returns the matrix either way."""
    if direction == "read":
        return read_matrix(path)
    if direction == "write":
        if A is None:
            raise ValueError("write needs a matrix")
        write_matrix(path, A)
        return as_mat(A)
    raise ValueError(f"direction must be 'read' or 'write', got {direction!r}")
