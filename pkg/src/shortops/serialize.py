"""JSON interchange formats for matrices, subspaces and reports.

A matrix file holds a nested list of entries: bare reals when ``complex`` is
false, two-element [re, im] pairs when true.  A subspace file wraps a matrix
payload whose columns span the subspace, or an orthogonal projection matrix
that is validated on load.  Numbers round-trip exactly (shortest repr).
"""

from __future__ import annotations

import json
import math

import numpy as np

from .geometry import Subspace
from .numcore import DEFAULT_TOL, Tolerance, as_operator


def matrix_to_payload(A) -> dict:
    A = as_operator(A)
    is_complex = bool(np.any(A.imag != 0.0))
    if is_complex:
        data = [[[float(z.real), float(z.imag)] for z in row] for row in A]
    else:
        data = [[float(z.real) for z in row] for row in A]
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "complex": is_complex,
        "data": data,
    }


def _entry(value, is_complex: bool) -> complex:
    if is_complex:
        if (not isinstance(value, (list, tuple)) or len(value) != 2
                or not all(isinstance(v, (int, float)) for v in value)):
            raise ValueError("complex entries must be [re, im] pairs")
        z = complex(value[0], value[1])
    else:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ValueError("real entries must be plain numbers")
        z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("matrix entries must be finite")
    return z


def matrix_from_payload(payload) -> np.ndarray:
    if not isinstance(payload, dict):
        raise ValueError("matrix payload must be an object")
    try:
        rows = int(payload["rows"])
        cols = int(payload["cols"])
        is_complex = bool(payload["complex"])
        data = payload["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix payload: {exc}") from exc
    if rows < 0 or cols < 0:
        raise ValueError("matrix dimensions must be nonnegative")
    if not isinstance(data, list) or len(data) != rows:
        raise ValueError("data row count does not match 'rows'")
    out = np.zeros((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise ValueError("data column count does not match 'cols'")
        for j, value in enumerate(row):
            out[i, j] = _entry(value, is_complex)
    return out


def subspace_to_payload(S: Subspace) -> dict:
    return {
        "ambient": int(S.ambient_dim),
        "kind": "basis",
        "data": matrix_to_payload(S.basis),
    }


def subspace_from_payload(payload, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    if not isinstance(payload, dict):
        raise ValueError("subspace payload must be an object")
    try:
        ambient = int(payload["ambient"])
        kind = payload["kind"]
        data = payload["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed subspace payload: {exc}") from exc
    M = matrix_from_payload(data)
    if M.shape[0] != ambient:
        raise ValueError("subspace data rows do not match 'ambient'")
    if kind == "basis":
        return Subspace.from_spanning(M, tol)
    if kind == "projection":
        return Subspace.from_projection(M, tol)
    raise ValueError(f"unknown subspace kind {kind!r}")


def load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_matrix(path: str) -> np.ndarray:
    return matrix_from_payload(load_json(path))


def load_subspace(path: str, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return subspace_from_payload(load_json(path), tol)


def dumps_report(obj) -> str:
    """Canonical JSON text: sorted keys, stable layout, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
