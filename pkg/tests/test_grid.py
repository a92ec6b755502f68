import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from ffharm import DUAL, PRIMAL, GridFunction, field_of_order
from ffharm.errors import BadExponent, GridTooLarge, SideMismatch, ValidationError
from ffharm.grid import all_points, check_grid, decode, encode, weighted_norm


@given(st.sampled_from([3, 5, 9]), st.integers(1, 4), st.data())
def test_encode_decode_roundtrip(q, d, data):
    idx = data.draw(arrays(np.int64, 10, elements=st.integers(0, q**d - 1)))
    assert np.array_equal(encode(decode(idx, q, d), q), idx)


def test_grid_order_first_coordinate_most_significant():
    pts = all_points(3, 2)
    assert pts[1].tolist() == [0, 1] and pts[3].tolist() == [1, 0]


@given(arrays(np.float64, 12, elements=st.floats(-1e3, 1e3)), st.sampled_from([1.0, 1.5, 2.0, 3.0, 7.0]))
def test_weighted_norm_matches_definition(v, p):
    w = 0.25
    want = (w * np.sum(np.abs(v) ** p)) ** (1 / p)
    assert math.isclose(weighted_norm(v, p, w), want, rel_tol=1e-9, abs_tol=1e-300)


def test_sup_norm_and_huge_exponent():
    v = np.array([1e-3, 2.0, -3.0])
    assert weighted_norm(v, math.inf, 0.5) == 3.0
    assert math.isfinite(weighted_norm(np.full(5, 1e200), 400.0, 1.0))


def test_measures_make_constants_unit_and_delta_point_mass():
    f = field_of_order(5)
    assert math.isclose(GridFunction.constant(PRIMAL, f, 3).norm(2), 1.0)
    assert math.isclose(GridFunction.delta(DUAL, f, 3).norm(1), 1.0)
    assert math.isclose(GridFunction.delta(PRIMAL, f, 3).norm(1), 5**-3)


def test_validation():
    f = field_of_order(3)
    with pytest.raises(ValidationError):
        GridFunction("weird", f, 2, np.zeros(9))
    with pytest.raises(ValidationError):
        GridFunction(PRIMAL, f, 2, np.zeros(8))
    with pytest.raises(SideMismatch):
        GridFunction.zeros(PRIMAL, f, 2) + GridFunction.zeros(DUAL, f, 2)
    with pytest.raises(BadExponent):
        weighted_norm(np.ones(3), 0.5, 1.0)
    with pytest.raises(GridTooLarge):
        check_grid(13, 8)


def test_values_are_read_only_and_arithmetic():
    f = field_of_order(3)
    g = GridFunction.delta(PRIMAL, f, 2, (1, 2), 2.0)
    with pytest.raises(ValueError):
        g.values[0] = 1
    assert g.at((1, 2)) == 2.0
    assert (2 * g - g).at((1, 2)) == 2.0
    assert (g * g).at((1, 2)) == 4.0
    assert g.cube().shape == (3, 3)
