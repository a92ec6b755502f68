import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from ffharm import DUAL, PRIMAL, GridFunction, QuadraticForm, enumerate_variety, field_of_order
from ffharm.errors import NegativeInput, NotIndicator, ValidationError
from ffharm.fourier import convolve, sigma_inv, transform_primal
from ffharm.operators import (
    SurfaceFunction,
    average,
    dyadic_cutoff,
    dyadic_decompose,
    extend,
    k_hat,
    kernel_K,
    restrict,
    restriction_energy,
)
from ffharm.variety import surface_measure

import oracle

CASES = [(3, (1, 2)), (5, (1, 4)), (3, (1, 1, 1)), (5, (1, 4, 1)), (9, (1, 1)), (3, (1, 2, 1, 2))]


def _v(q, coeffs):
    f = field_of_order(q)
    return enumerate_variety(QuadraticForm(f, diag=list(coeffs)))


@pytest.mark.parametrize("q,coeffs", CASES)
def test_extend_matches_definition_and_is_adjoint_to_restrict(q, coeffs):
    v = _v(q, coeffs)
    F = oracle.PolyField(v.field.p, v.field.modulus)
    rng = np.random.default_rng(0)
    f = SurfaceFunction(v, rng.normal(size=v.cardinality) + 1j * rng.normal(size=v.cardinality))
    if q**v.d <= 125:
        pts, S = F.points(v.d), [tuple(x) for x in v.points]
        want = [sum(fx * F.chi(F.dot(x, m)) for fx, x in zip(f.values, S)) / len(S) for m in pts]
        assert np.allclose(extend(f).values, want, atol=1e-10)
    g = GridFunction(DUAL, v.field, v.d, rng.normal(size=q**v.d) + 1j * rng.normal(size=q**v.d))
    lhs = np.vdot(g.values, extend(f).values)  # <Ef, g>_dm
    rhs = np.vdot(restrict(g, v).values, f.values) / v.cardinality  # <f, Rg>_sigma
    assert np.isclose(lhs, rhs)


@pytest.mark.parametrize("q,coeffs", CASES)
def test_average_paths_agree_with_convolution_by_sigma(q, coeffs):
    v = _v(q, coeffs)
    rng = np.random.default_rng(1)
    f = GridFunction(PRIMAL, v.field, v.d, rng.normal(size=q**v.d))
    direct, fft = average(f, v, "direct"), average(f, v, "fft")
    assert np.allclose(direct.values, fft.values, atol=1e-10)
    assert np.allclose(direct.values, convolve(f, surface_measure(v)).values, atol=1e-10)
    h = GridFunction(PRIMAL, v.field, v.d, rng.normal(size=q**v.d))
    # self-adjoint for dx and mass preserving
    assert np.isclose(np.vdot(h.values, direct.values), np.vdot(average(h, v).values, f.values))
    assert np.isclose(direct.values.sum(), f.values.sum())


def test_average_validation():
    v = _v(3, (1, 2))
    with pytest.raises(ValidationError):
        average(GridFunction.zeros(DUAL, v.field, 2), v)
    with pytest.raises(ValidationError):
        average(GridFunction.zeros(PRIMAL, v.field, 2), v, "bogus")


@pytest.mark.parametrize("q,coeffs", CASES)
def test_kernels(q, coeffs):
    v = _v(q, coeffs)
    K, Kh = kernel_K(v), k_hat(v)
    assert np.allclose(K.values + GridFunction.delta(DUAL, v.field, v.d).values, sigma_inv(v).values)
    # K-hat is the primal transform partner of K: (K-hat)^vee = K
    from ffharm.fourier import vee
    assert np.allclose(vee(Kh).values, K.values, atol=1e-10)
    assert np.isclose(Kh.values.sum(), 0)


@given(st.sampled_from(CASES), st.integers(0, 10**6))
def test_restriction_energy(case, seed):
    v = _v(*case)
    rng = np.random.default_rng(seed)
    ind = (rng.random(v.q**v.d) < rng.random()).astype(float)
    E = GridFunction(PRIMAL, v.field, v.d, ind)
    want = float(np.sum(np.abs(transform_primal(E).values[v.indices]) ** 2))
    assert math.isclose(restriction_energy(E, v), want, rel_tol=1e-12, abs_tol=1e-15)
    with pytest.raises(NotIndicator):
        restriction_energy(E.like(E.values * 2.0 + 3.0), v)


@given(st.sampled_from([3, 5, 7, 9, 13]), st.integers(1, 5), st.floats(1.0, 50.0))
def test_dyadic_cutoff_is_smallest(q, d, p):
    N = dyadic_cutoff(q, d, p)
    assert 2.0 ** -(N + 1) <= q ** (-d / p)
    assert N == 0 or 2.0 ** -N > q ** (-d / p)
    assert dyadic_cutoff(q, d, math.inf) == 0


@given(arrays(np.float64, 25, elements=st.floats(0, 1e6)), st.integers(0, 12))
def test_dyadic_decomposition(raw, levels):
    f = GridFunction(PRIMAL, field_of_order(5), 2, raw)
    dec = dyadic_decompose(f, levels)
    assert dec.N == levels
    cover = sum(s.values.real for s in dec.level_sets)
    assert cover.max() <= 1
    assert np.array_equal(dec.reconstruct().values, f.values)
    top = raw.max()
    for k, (piece, s) in enumerate(zip(dec.levels, dec.level_sets)):
        on = s.values.real == 1
        assert np.all(raw[on] > top * 2.0 ** (-k - 1)) and np.all(raw[on] <= top * 2.0**-k)
        assert np.array_equal(piece.values.real[on], raw[on])
    if top > 0:
        assert np.all(dec.tail.values.real <= top * 2.0 ** -(levels + 1))


def test_dyadic_rejects_negative():
    f = GridFunction(PRIMAL, field_of_order(3), 1, [1, -1, 0])
    with pytest.raises(NegativeInput):
        dyadic_decompose(f, 2)
    with pytest.raises(ValidationError):
        dyadic_decompose(f * 0, -1)


def test_surface_function_helpers():
    v = _v(5, (1, 4))
    c = SurfaceFunction.constant(v, 2.0)
    assert math.isclose(c.norm(3), 2.0)
    assert np.array_equal(SurfaceFunction.from_grid(v, c.to_grid()).values, c.values)
    with pytest.raises(ValidationError):
        SurfaceFunction(v, np.ones(3))
