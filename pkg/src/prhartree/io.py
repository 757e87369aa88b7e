"""PRHF binary fields and JSON report output.

PRHF layout (little-endian): magic ``b"PRHF"``, ``uint32`` version, ``uint32``
dim, ``uint32`` n, ``float64`` extent, then ``n**dim`` ``float64`` values in
row-major order.
"""

from __future__ import annotations

import json
import math
import struct
from importlib import resources
from pathlib import Path

import numpy as np

from .lattice import Field, Lattice

__all__ = ["MAGIC", "FORMAT_VERSION", "write_field", "read_field", "write_json", "load_schema", "validate_json"]

MAGIC = b"PRHF"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIId")


def write_field(path, f: Field) -> Path:
    path = Path(path)
    lat = f.lattice
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, lat.dim, lat.n, lat.extent))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())
    return path


def read_field(path) -> Field:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated PRHF header")
    magic, version, dim, n, extent = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a PRHF file (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported PRHF version {version}")
    lat = Lattice(dim, n, extent)
    body = data[_HEADER.size :]
    if len(body) != 8 * lat.size:
        raise ValueError(f"{path}: expected {lat.size} values, found {len(body) // 8}")
    values = np.frombuffer(body, dtype="<f8").astype(float).reshape(lat.shape)
    return Field(lat, values)


def _clean(obj):
    """Make an object JSON-safe: numpy scalars to Python, non-finite floats to ``None``."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def to_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(to_json(obj) + "\n")
    return path


def load_schema(name: str) -> dict:
    text = resources.files("prhartree").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate_json(obj, name: str) -> None:
    """Validate against a shipped schema; raises ``jsonschema.ValidationError``."""
    import jsonschema

    jsonschema.validate(_clean(obj), load_schema(name))
