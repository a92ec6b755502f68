"""On-disk formats: GridFunction CSV and binary dumps, JSON helpers."""

from __future__ import annotations

import csv
import io
import json
import math
import struct

import numpy as np

from .errors import ValidationError
from .field import build_field
from .grid import DUAL, PRIMAL, GridFunction, decode

MAGIC = b"FFHG"
_HEADER = struct.Struct("<4sIIIIB")  # magic, q, p, n, d, side (0 primal, 1 dual)


def grid_to_csv(h: GridFunction, points: bool = False) -> str:
    """Header row then one ``index,re,im`` row per grid point (optionally with coordinates)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    coords = decode(np.arange(h.size), h.q, h.d) if points else None
    w.writerow(["index", "re", "im"] + ([f"x{j + 1}" for j in range(h.d)] if points else []))
    for i, z in enumerate(h.values):
        row = [i, repr(float(z.real)), repr(float(z.imag))]
        if points:
            row += [int(c) for c in coords[i]]
        w.writerow(row)
    return buf.getvalue()


def grid_from_csv(text: str, side: str, field, d: int) -> GridFunction:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:3] != ["index", "re", "im"]:
        raise ValidationError("CSV must start with the header index,re,im")
    vals = np.zeros(field.q**d, dtype=np.complex128)
    for row in rows[1:]:
        vals[int(row[0])] = complex(float(row[1]), float(row[2]))
    return GridFunction(side, field, d, vals)


def grid_to_bytes(h: GridFunction) -> bytes:
    f = h.field
    if f.n > 1 and f.modulus is None:
        raise ValidationError("extension field without modulus")
    head = _HEADER.pack(MAGIC, h.q, f.p, f.n, h.d, 0 if h.side == PRIMAL else 1)
    mod = b"" if f.n == 1 else struct.pack(f"<{f.n + 1}I", *f.modulus)
    return head + mod + np.ascontiguousarray(h.values, dtype="<c16").tobytes()


def grid_from_bytes(data: bytes) -> GridFunction:
    if len(data) < _HEADER.size:
        raise ValidationError("truncated grid dump")
    magic, q, p, n, d, side = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValidationError("not a grid dump (bad magic)")
    off = _HEADER.size
    modulus = None
    if n > 1:
        modulus = struct.unpack_from(f"<{n + 1}I", data, off)
        off += 4 * (n + 1)
    field = build_field(p, n, modulus)
    vals = np.frombuffer(data[off:], dtype="<c16")
    if vals.size != q**d:
        raise ValidationError(f"expected {q ** d} values, found {vals.size}")
    return GridFunction(DUAL if side else PRIMAL, field, d, vals.astype(np.complex128))


def jsonable(obj):
    """Recursively convert numpy scalars/arrays, complex numbers and infinities."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


__all__ = ["grid_to_csv", "grid_from_csv", "grid_to_bytes", "grid_from_bytes", "jsonable", "dumps", "MAGIC"]
