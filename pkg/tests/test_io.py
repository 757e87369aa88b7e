import json

import numpy as np
import pytest

from prhartree import Field, Lattice
from prhartree.io import MAGIC, read_field, to_json, validate_json, write_field


def test_roundtrip(tmp_path, rng):
    lat = Lattice(3, 8, 5.5)
    f = Field(lat, rng.standard_normal(lat.shape))
    p = write_field(tmp_path / "f.prhf", f)
    g = read_field(p)
    assert g.lattice == lat and np.array_equal(g.values, f.values)
    assert p.read_bytes()[:4] == MAGIC
    assert p.stat().st_size == 24 + 8 * lat.size


def test_rejects_corrupt_files(tmp_path):
    lat = Lattice(1, 8, 1.0)
    p = write_field(tmp_path / "f.prhf", lat.zeros())
    data = p.read_bytes()
    (tmp_path / "magic.prhf").write_bytes(b"XXXX" + data[4:])
    (tmp_path / "short.prhf").write_bytes(data[:-8])
    (tmp_path / "head.prhf").write_bytes(data[:10])
    for name in ("magic", "short", "head"):
        with pytest.raises(ValueError):
            read_field(tmp_path / f"{name}.prhf")


def test_json_cleaning():
    text = to_json({"a": np.float64(1.5), "b": np.inf, "c": np.arange(2), "d": np.bool_(True)})
    assert json.loads(text) == {"a": 1.5, "b": None, "c": [0, 1], "d": True}


def test_schema_validation():
    import jsonschema

    good = {
        "field": "u.prhf",
        "m": 1.0,
        "alpha": None,
        "fitted_rate": 1.0,
        "intercept": 0.0,
        "window": [2, 4],
        "r_squared": 0.99,
        "reference_rate": 1.0,
        "within_tolerance": True,
        "bins_used": 8,
    }
    validate_json(good, "decay_fit")
    with pytest.raises(jsonschema.ValidationError):
        validate_json({**good, "bins_used": 2}, "decay_fit")
