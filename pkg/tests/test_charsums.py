import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffharm import field_of_order
from ffharm.charsums import complete_square_closed_form, complete_square_sum, gauss_sum, square_character_sum
from ffharm.errors import ZeroLeadingCoefficient

import oracle


@pytest.mark.parametrize("q", [3, 5, 9, 25, 27])
def test_gauss_sum_matches_polynomial_oracle(q):
    f = field_of_order(q)
    F = oracle.PolyField(f.p, f.modulus)
    for t in range(q):
        assert cmath.isclose(gauss_sum(t, f), oracle.gauss_sum(F, t), abs_tol=1e-9)


@given(st.sampled_from([3, 5, 7, 9, 11, 13, 25, 27]), st.data())
def test_gauss_sum_twists_by_eta(q, data):
    f = field_of_order(q)
    t = data.draw(st.integers(1, q - 1))
    assert cmath.isclose(gauss_sum(t, f), f.eta[t] * gauss_sum(1, f), abs_tol=1e-9)


@given(st.sampled_from([3, 5, 7, 9, 11, 25]), st.data())
def test_square_sum_equals_gauss_sum(q, data):
    f = field_of_order(q)
    t = data.draw(st.integers(1, q - 1))
    assert cmath.isclose(square_character_sum(t, f), gauss_sum(t, f), abs_tol=1e-9)


@given(st.sampled_from([3, 5, 7, 9, 13, 25, 27]), st.data())
def test_complete_square(q, data):
    f = field_of_order(q)
    a = data.draw(st.integers(1, q - 1))
    b = data.draw(st.integers(0, q - 1))
    assert cmath.isclose(complete_square_sum(a, b, f), complete_square_closed_form(a, b, f), abs_tol=1e-9)


def test_element_arguments_and_zero_leading_coefficient():
    f = field_of_order(7)
    assert cmath.isclose(complete_square_sum(f.element(3), f.element(2)), complete_square_closed_form(3, 2, f))
    with pytest.raises(ZeroLeadingCoefficient):
        complete_square_sum(0, 1, f)
    with pytest.raises(ZeroLeadingCoefficient):
        complete_square_closed_form(0, 1, f)


def test_prime_field_gauss_sum_sign():
    # for prime p the classical evaluation is sqrt(p) or i sqrt(p)
    for p in (3, 5, 7, 11, 13):
        g = gauss_sum(1, field_of_order(p))
        want = np.sqrt(p) if p % 4 == 1 else 1j * np.sqrt(p)
        assert cmath.isclose(g, want, abs_tol=1e-9)
