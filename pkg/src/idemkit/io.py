"""JSON encoding shared by the library and the CLI.

Matrices are arrays of rows of [re, im] pairs. Every float is written with
15 significant digits so repeated runs give byte-identical files.
"""
import dataclasses
import json

import numpy as np

from .errors import BadDims, BadParam
from .grid import GridOperator

SCHEMA = 1


def num(x):
    x = float(x)
    if not np.isfinite(x):
        return None
    return float(f"{x:.15g}") + 0.0  # folds -0.0 into 0.0


def encode_complex(z):
    z = complex(z)
    return [num(z.real), num(z.imag)]


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return [[encode_complex(z) for z in row] for row in M]


def decode_matrix(obj):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise BadDims(f"matrix entries must be [re, im] pairs: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise BadDims(f"expected rows of [re, im] pairs, got array of shape {arr.shape}")
    M = arr[..., 0] + 1j * arr[..., 1]
    if not np.all(np.isfinite(M)):
        raise BadDims("matrix has non-finite entries")
    return M


def jsonable(obj):
    """Recursively convert numpy values, complex numbers and dataclasses."""
    if obj is None or isinstance(obj, (bool, np.bool_, str)):
        return bool(obj) if isinstance(obj, np.bool_) else obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_matrix(obj) if obj.ndim == 2 else [jsonable(x) for x in obj]
        return [jsonable(x) for x in obj]
    if dataclasses.is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.name != "func"}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2) + "\n"


def idempotent_doc(Q):
    return {"schema": SCHEMA, "kind": "idempotent", "matrix": encode_matrix(Q.Q),
            "defect": num(Q.defect), "norm": num(Q.norm), "is_projection": bool(Q.is_projection)}


def canonical_doc(cf):
    return {"schema": SCHEMA, "kind": "canonical", "V": encode_matrix(cf.V),
            "dims": {"h1": cf.h1, "h4": cf.h4, "h5": cf.h5}, "D": encode_matrix(cf.D)}


def grid_doc(F):
    return {"schema": SCHEMA, "kind": "grid", "d": num(F.d), "mesh": [num(t) for t in F.mesh],
            "scalar_slot": None if F.scalar_slot is None else encode_complex(F.scalar_slot),
            "blocks": [encode_matrix(f) for f in F.blocks], "continuum": bool(F.continuum)}


def grid_from_doc(doc):
    try:
        blocks = np.array([decode_matrix(b) for b in doc["blocks"]])
        s = doc.get("scalar_slot")
        s = None if s is None else complex(s[0], s[1])
        return GridOperator(float(doc["d"]), np.asarray(doc["mesh"], dtype=float), s, blocks,
                            bool(doc.get("continuum", True)))
    except (KeyError, TypeError, IndexError) as exc:
        raise BadParam(f"malformed grid document: {exc}") from exc


def matrix_from_doc(doc):
    """Accept a bare matrix or a document with a "matrix" field."""
    if isinstance(doc, dict):
        if "matrix" not in doc:
            raise BadDims("document has no 'matrix' field")
        doc = doc["matrix"]
    return decode_matrix(doc)


def load(path):
    with open(path) as fh:
        return json.load(fh)
