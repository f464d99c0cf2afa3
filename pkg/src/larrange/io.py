"""Readers and writers: LAR-JSON, segment JSON, Wavefront OBJ, Matrix Market.

LAR-JSON is an object with ``dim``, ``V`` (coordinate rows) and optional
``EV``, ``FV``, ``CV`` (0-based index arrays).  Results also carry a
``boundary`` object mapping the grade p to ``{"shape": [m, n], "coo": [[i, j, v], ...]}``
and the ``outer`` chain of the unbounded cell.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .chains import SignedOperator, read_matrix_market, write_matrix_market
from .errors import ParseError, UnsupportedFormat, ValidationError
from .lar import ChainComplexResult, GeometricComplex
from .scenes import from_faces


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def complex_from_dict(obj: dict) -> GeometricComplex:
    if not isinstance(obj, dict) or "V" not in obj:
        raise ParseError("LAR-JSON object needs at least a 'V' array")
    try:
        V = np.asarray(obj["V"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad vertex array: {exc}") from exc
    if V.ndim != 2:
        raise ParseError("'V' must be an array of coordinate rows")
    dim = int(obj.get("dim", V.shape[1]))
    if V.shape[1] != dim:
        raise ValidationError(f"dim={dim} but vertices have {V.shape[1]} coordinates")
    cx = GeometricComplex(dim, V, obj.get("EV", []), obj.get("FV", []), obj.get("CV", []))
    cx.validate()
    if "boundary" in obj and "2" in obj["boundary"]:
        b = obj["boundary"]["2"]
        cx.face_boundary = SignedOperator.from_coo(tuple(b["shape"]), b["coo"], grade=2)
    return cx


def complex_to_dict(cx: GeometricComplex) -> dict:
    out = {"dim": cx.dim, "V": cx.V.tolist(), "EV": [list(e) for e in cx.EV]}
    if cx.FV:
        out["FV"] = [list(f) for f in cx.FV]
    if cx.CV:
        out["CV"] = [list(c) for c in cx.CV]
    return out


def _op_dict(op: SignedOperator) -> dict:
    return {"shape": list(op.shape), "coo": [list(t) for t in op.to_coo()]}


def result_to_dict(result: ChainComplexResult) -> dict:
    out = {"dim": result.dim, "V": result.V.tolist()}
    for p, key in ((1, "EV"), (2, "FV"), (3, "CV")):
        if p in result.cells:
            out[key] = [list(c) for c in result.cells[p]]
    out["boundary"] = {str(p): _op_dict(op) for p, op in sorted(result.boundary.items())}
    out["outer"] = {"size": result.outer.size, "coo": [[int(i), int(v)] for i, v in zip(result.outer.indices, result.outer.values)]}
    return out


def write_result(result: ChainComplexResult, path) -> None:
    with open(path, "w") as fh:
        json.dump(result_to_dict(result), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def read_result_operators(path) -> dict[int, SignedOperator]:
    obj = _load_json(path)
    try:
        return {int(p): SignedOperator.from_coo(tuple(b["shape"]), b["coo"], grade=int(p)) for p, b in obj["boundary"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed boundary object") from exc


def read_segments(path) -> np.ndarray:
    """Plane segments from raw JSON rows ``[x1, y1, x2, y2]`` or a 2D LAR-JSON edge list."""
    obj = _load_json(path)
    if isinstance(obj, dict):
        cx = complex_from_dict(obj)
        if cx.dim != 2:
            raise ValidationError("expected a planar (dim 2) complex")
        if not cx.EV:
            raise ValidationError("planar input has no edges")
        return np.array([[cx.V[a], cx.V[b]] for a, b in cx.EV])
    try:
        S = np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: segments must be rows of four numbers") from exc
    if S.ndim != 2 or S.shape[1] != 4:
        raise ParseError(f"{path}: segments must be rows of four numbers")
    if not np.all(np.isfinite(S)):
        raise ValidationError("non-finite segment coordinate")
    return S.reshape(-1, 2, 2)


def read_obj(path) -> GeometricComplex:
    V, faces = [], []
    try:
        with open(path) as fh:
            for line in fh:
                parts = line.split()
                if not parts or parts[0].startswith("#"):
                    continue
                if parts[0] == "v":
                    V.append([float(x) for x in parts[1:4]])
                elif parts[0] == "f":
                    loop = []
                    for tok in parts[1:]:
                        k = int(tok.split("/")[0])
                        loop.append(k - 1 if k > 0 else len(V) + k)
                    faces.append(loop)
    except (OSError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not V or not faces:
        raise ParseError(f"{path}: no vertices or faces")
    if any(k < 0 or k >= len(V) for f in faces for k in f):
        raise ValidationError(f"{path}: face refers to a missing vertex")
    return from_faces(np.array(V), faces)


def read_complexes(path) -> list[GeometricComplex]:
    """3D input: OBJ, a LAR-JSON object, or a JSON array of LAR-JSON objects."""
    if str(path).lower().endswith(".obj"):
        return [read_obj(path)]
    obj = _load_json(path)
    items = obj if isinstance(obj, list) else [obj]
    out = [complex_from_dict(o) for o in items]
    for cx in out:
        if cx.dim != 3:
            raise ValidationError("expected spatial (dim 3) complexes")
        if cx.FV and not cx.EV:
            raise ValidationError("faces given without an edge list")
    return out


def _write_ops(ops: dict, directory) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for p, op in sorted(ops.items()):
        path = d / f"boundary_{p}.mtx"
        write_matrix_market(path, op)
        paths.append(path)
    return paths


def export_matrix_market(result: ChainComplexResult, directory) -> list[Path]:
    return _write_ops(result.boundary, directory)


def convert(input_path, src: str, dst: str, output) -> list[Path]:
    """Convert between OBJ, LAR-JSON and Matrix Market operator files."""
    if src not in ("obj", "lar-json") or dst not in ("lar-json", "mm"):
        raise UnsupportedFormat(f"cannot convert {src} to {dst}")
    if src == "obj":
        cx = read_obj(input_path)
    else:
        obj = _load_json(input_path)
        if dst == "mm" and isinstance(obj, dict) and "boundary" in obj:
            return _write_ops(read_result_operators(input_path), output)
        cx = complex_from_dict(obj)
    if dst == "lar-json":
        with open(output, "w") as fh:
            json.dump(complex_to_dict(cx), fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
        return [Path(output)]
    ops = {1: cx.boundary_1()}
    if cx.FV:
        ops[2] = cx.boundary_2()
    return _write_ops(ops, output)


def read_operator_mm(path, grade=None) -> SignedOperator:
    try:
        return read_matrix_market(path, grade)
    except (OSError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
