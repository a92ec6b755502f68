import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffharm import DUAL, PRIMAL, GridFunction, field_of_order
from ffharm.errors import ValidationError
from ffharm.formats import MAGIC, dumps, grid_from_bytes, grid_from_csv, grid_to_bytes, grid_to_csv, jsonable


def _grid(q, d, side, seed):
    rng = np.random.default_rng(seed)
    n = q**d
    return GridFunction(side, field_of_order(q), d, rng.normal(size=n) + 1j * rng.normal(size=n))


@given(st.sampled_from([(3, 2), (9, 2), (5, 1), (27, 1), (3, 3)]), st.sampled_from([PRIMAL, DUAL]), st.integers(0, 999))
def test_binary_roundtrip_is_exact(qd, side, seed):
    g = _grid(*qd, side, seed)
    blob = grid_to_bytes(g)
    assert blob[:4] == MAGIC
    back = grid_from_bytes(blob)
    assert back.side == side and back.field == g.field and back.d == g.d
    assert np.array_equal(back.values, g.values)


@given(st.sampled_from([(3, 2), (9, 2), (5, 2)]), st.integers(0, 999))
def test_csv_roundtrip_is_exact(qd, seed):
    g = _grid(*qd, DUAL, seed)
    text = grid_to_csv(g)
    assert text.splitlines()[0] == "index,re,im"
    assert len(text.splitlines()) == g.size + 1
    back = grid_from_csv(text, DUAL, g.field, g.d)
    assert np.array_equal(back.values, g.values)


def test_csv_with_points():
    g = GridFunction.delta(DUAL, field_of_order(3), 2, (1, 2))
    lines = grid_to_csv(g, points=True).splitlines()
    assert lines[0] == "index,re,im,x1,x2"
    assert lines[6] == "5,1.0,0.0,1,2"


def test_corrupt_inputs():
    g = _grid(3, 2, PRIMAL, 0)
    blob = grid_to_bytes(g)
    with pytest.raises(ValidationError):
        grid_from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(ValidationError):
        grid_from_bytes(blob[:-16])
    with pytest.raises(ValidationError):
        grid_from_bytes(blob[:5])
    with pytest.raises(ValidationError):
        grid_from_csv("a,b,c\n", PRIMAL, g.field, 2)


def test_jsonable():
    doc = jsonable({"a": np.int64(3), "b": np.array([1.5, math.inf]), "c": 1 + 2j, 4: np.bool_(True), "n": float("nan")})
    assert doc == {"a": 3, "b": [1.5, "inf"], "c": [1.0, 2.0], "4": True, "n": "nan"}
    assert json.loads(dumps({"z": 1, "a": [np.float32(0.5)]})) == {"a": [0.5], "z": 1}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')
