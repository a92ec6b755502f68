import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffharm import FiniteField, build_field, field_of_order
from ffharm.errors import DivisionByZero, EvenCharacteristic, MixedFields, NonPrime, ReducibleModulus, ValidationError
from ffharm.field import additive_character, prime_power, quadratic_character, sqrt_element, trace

from oracle import PolyField

ORDERS = [3, 5, 7, 9, 11, 13, 25, 27, 49]


def _pair(q):
    f = field_of_order(q)
    return f, PolyField(f.p, f.modulus)


@pytest.mark.parametrize("q", [3, 9, 25, 27])
def test_tables_match_polynomial_arithmetic(q):
    f, F = _pair(q)
    a = np.arange(q)
    for x in range(q):
        assert [F.add(x, y) for y in a] == f.add[x].tolist()
        assert [F.mul(x, y) for y in a] == f.mul[x].tolist()
        assert F.trace(x) == f.trace[x]
        assert F.eta(x) == f.eta[x]


@pytest.mark.parametrize("q", ORDERS)
def test_multiplicative_group_is_cyclic_of_order_q_minus_1(q):
    f = field_of_order(q)
    orders = []
    for x in range(1, q):
        e, y = 1, x
        while y != 1:
            y = f.mul[y, x]
            e += 1
        orders.append(e)
    assert max(orders) == q - 1
    assert all((q - 1) % o == 0 for o in orders)


@given(st.sampled_from(ORDERS), st.data())
def test_field_axioms(q, data):
    f = field_of_order(q)
    x, y, z = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert f.add[x, f.add[y, z]] == f.add[f.add[x, y], z]
    assert f.mul[x, f.mul[y, z]] == f.mul[f.mul[x, y], z]
    assert f.mul[x, f.add[y, z]] == f.add[f.mul[x, y], f.mul[x, z]]
    assert f.add[x, f.neg[x]] == 0
    if x:
        assert f.mul[x, f.inv[x]] == 1


@given(st.sampled_from(ORDERS), st.data())
def test_element_operators(q, data):
    f = field_of_order(q)
    a = f.element(data.draw(st.integers(0, q - 1)))
    b = f.element(data.draw(st.integers(1, q - 1)))
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert -(-a) == a
    assert b ** (q - 1) == f.element(1)
    assert a**q == a  # Frobenius fixes F_q


@given(st.sampled_from(ORDERS), st.data())
def test_character_and_eta_are_homomorphisms(q, data):
    f = field_of_order(q)
    x, y = data.draw(st.integers(0, q - 1)), data.draw(st.integers(0, q - 1))
    assert np.isclose(f.chi[f.add[x, y]], f.chi[x] * f.chi[y])
    assert f.eta[f.mul[x, y]] == f.eta[x] * f.eta[y]


@pytest.mark.parametrize("q", ORDERS)
def test_character_sums_vanish_and_squares_counted(q):
    f = field_of_order(q)
    assert abs(f.chi.sum()) < 1e-9
    assert (f.eta == 1).sum() == (q - 1) // 2
    for x in range(q):
        r = f.sqrt[x]
        if f.eta[x] == -1:
            assert r == -1
        else:
            assert f.mul[r, r] == x


def test_element_helpers():
    f = field_of_order(9)
    x = f.element((1, 1))
    assert trace(x) == f.trace[x.value]
    assert quadratic_character(x) == f.eta[x.value]
    assert np.isclose(additive_character(x), f.chi[x.value])
    r = sqrt_element(f.element(2))
    assert r is not None and r * r == f.element(2)
    assert sqrt_element(f.element((1, 1))) is None
    assert x.digits == (1, 1)


def test_prime_power_and_constructor_errors():
    assert prime_power(27) == (3, 3)
    with pytest.raises(EvenCharacteristic):
        field_of_order(4)
    with pytest.raises(NonPrime):
        build_field(9, 1)
    with pytest.raises(ValidationError):
        field_of_order(15)
    with pytest.raises(ReducibleModulus):
        build_field(3, 2, (2, 0, 1))  # t^2 - 1 = (t - 1)(t + 1)
    with pytest.raises(ReducibleModulus):
        build_field(3, 2, (1, 0, 2))  # not monic


def test_custom_modulus_gives_isomorphic_field():
    f = build_field(3, 2, (2, 2, 1))  # t^2 + 2t + 2
    assert isinstance(f, FiniteField) and f.q == 9
    assert sorted(np.bincount(f.eta + 1).tolist()) == [1, 4, 4]


def test_errors_on_bad_elements():
    f, g = field_of_order(5), field_of_order(7)
    with pytest.raises(DivisionByZero):
        f.element(1) / f.element(0)
    with pytest.raises(MixedFields):
        f.element(1) + g.element(1)
    with pytest.raises(ValidationError):
        f.element(5)


def test_fields_are_cached_and_serializable():
    assert field_of_order(9) is field_of_order(9)
    assert field_of_order(9).to_json() == {"p": 3, "n": 2, "q": 9, "modulus": [1, 0, 1]}
