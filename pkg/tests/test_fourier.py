import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffharm import DUAL, PRIMAL, GridFunction, QuadraticForm, enumerate_variety, field_of_order
from ffharm.errors import NotDiagonal, SideMismatch, ValidationError
from ffharm.fourier import (
    character_sum,
    convolve,
    convolve_direct,
    decay_max,
    inverse_transform,
    lp_norm,
    predicted_decay,
    sigma_inv,
    sigma_inv_bruteforce,
    sigma_inv_closed_form,
    transform_dual,
    transform_primal,
    vee,
)

import oracle

SMALL = [(3, 2), (5, 2), (3, 3), (9, 2)]


def _rand(rng, side, f, d):
    n = f.q**d
    return GridFunction(side, f, d, rng.normal(size=n) + 1j * rng.normal(size=n))


@pytest.mark.parametrize("q,d", SMALL)
def test_transforms_match_oracle(q, d):
    f = field_of_order(q)
    F = oracle.PolyField(f.p, f.modulus)
    rng = np.random.default_rng(q * 10 + d)
    h = _rand(rng, PRIMAL, f, d)
    assert np.allclose(transform_primal(h).values, oracle.primal_hat(F, d, h.values), atol=1e-10)
    g = _rand(rng, DUAL, f, d)
    assert np.allclose(transform_dual(g).values, oracle.dual_hat(F, d, g.values), atol=1e-9)


@pytest.mark.parametrize("q,d", [(3, 2), (5, 2), (9, 2), (3, 3), (7, 2)])
def test_fft_path_equals_dense_path(q, d):
    f = field_of_order(q)
    rng = np.random.default_rng(1)
    v = rng.normal(size=q**d) + 0j
    for sign in (1, -1):
        assert np.allclose(character_sum(v, f, d, sign), character_sum(v, f, d, sign, dense=True), atol=1e-9)


@given(st.sampled_from([(3, 2), (5, 2), (3, 3), (9, 2), (7, 2), (25, 1), (27, 1)]), st.integers(0, 10**6))
def test_plancherel_and_inversion(qd, seed):
    q, d = qd
    f = field_of_order(q)
    rng = np.random.default_rng(seed)
    h = _rand(rng, PRIMAL, f, d)
    H = transform_primal(h)
    assert math.isclose(h.norm(2), H.norm(2), rel_tol=1e-10)
    assert np.allclose(inverse_transform(H).values, h.values, atol=1e-10)
    g = _rand(rng, DUAL, f, d)
    assert np.allclose(vee(transform_dual(g)).values, g.values, atol=1e-10)
    assert math.isclose(g.norm(2), transform_dual(g).norm(2), rel_tol=1e-10)
    assert np.allclose(vee(h).values, np.conj(transform_primal(h.like(np.conj(h.values))).values), atol=1e-10)


@pytest.mark.parametrize("q,d", [(3, 2), (9, 2), (5, 2)])
@pytest.mark.parametrize("side", [PRIMAL, DUAL])
def test_convolution_matches_oracle(q, d, side):
    f = field_of_order(q)
    F = oracle.PolyField(f.p, f.modulus)
    rng = np.random.default_rng(3)
    a, b = _rand(rng, side, f, d), _rand(rng, side, f, d)
    weight = q**-d if side == PRIMAL else 1.0
    want = oracle.convolve(F, d, a.values, b.values, weight)
    assert np.allclose(convolve(a, b).values, want, atol=1e-9)
    assert np.allclose(convolve_direct(a, b).values, want, atol=1e-9)


def test_side_checks():
    f = field_of_order(3)
    with pytest.raises(SideMismatch):
        transform_primal(GridFunction.zeros(DUAL, f, 2))
    with pytest.raises(SideMismatch):
        transform_dual(GridFunction.zeros(PRIMAL, f, 2))
    assert lp_norm(GridFunction.constant(DUAL, f, 2), 1) == 9


def _forms(q, d, count, seed):
    f = field_of_order(q)
    rng = np.random.default_rng(seed)
    return [QuadraticForm(f, diag=[f.element(int(c)) for c in rng.integers(1, q, size=d)]) for _ in range(count)]


@pytest.mark.parametrize("q,d", [(3, 2), (3, 3), (5, 2), (5, 3), (9, 2), (3, 4)])
def test_sigma_vee_against_oracle(q, d):
    for form in _forms(q, d, 3, q + d):
        F = oracle.PolyField(form.field.p, form.field.modulus)
        want = oracle.sigma_vee(F, form.coeffs)
        v = enumerate_variety(form)
        for got in (sigma_inv(v), sigma_inv_bruteforce(v, "direct"), sigma_inv_bruteforce(v, "separable"),
                    sigma_inv_closed_form(form)):
            assert got.side == DUAL
            assert np.allclose(got.values, want, atol=1e-9)


@given(st.sampled_from([3, 5, 7, 9, 11, 13, 25]), st.integers(2, 4), st.integers(0, 10**6))
def test_closed_form_property(q, d, seed):
    if q**d > 30000:
        return
    form = _forms(q, d, 1, seed)[0]
    v = enumerate_variety(form)
    assert np.abs(sigma_inv_bruteforce(v).values - sigma_inv_closed_form(form).values).max() <= 1e-9
    s = sigma_inv(v)
    assert math.isclose(s.values[0].real, 1.0, rel_tol=1e-12)  # probability measure
    assert np.abs(s.values.imag).max() < 1e-9  # S = -S makes it real
    assert math.isclose(decay_max(v, s), predicted_decay(form), rel_tol=1e-9)


def test_closed_form_needs_diagonal_and_known_value():
    f = field_of_order(3)
    gram = [[0, 1], [1, 0]]
    with pytest.raises(NotDiagonal):
        sigma_inv_closed_form(QuadraticForm(f, gram=gram))
    s = sigma_inv(enumerate_variety(QuadraticForm(f, diag=[1, 1, 1])))
    assert math.isclose(s.at((1, 0, 0)).real, -1 / 3, abs_tol=1e-12)
    with pytest.raises(ValidationError):
        sigma_inv_bruteforce(enumerate_variety(QuadraticForm(f, diag=[1, 1, 1])), "bogus")


def test_anisotropic_plane_decay():
    f = field_of_order(3)
    form = QuadraticForm(f, diag=[1, 1])  # -1 is a nonsquare mod 3
    v = enumerate_variety(form)
    assert v.cardinality == 1
    assert math.isclose(decay_max(v), predicted_decay(form))
