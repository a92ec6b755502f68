import math
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ffharm.errors import BadDimension, BadScheme, BadSubspaceDim, NonPositiveValue, TooFewPoints, ValidationError
from ffharm.experiments import (
    ExponentRegion,
    HalfPlane,
    averaging_subspace_vertices,
    derived_seed,
    fit_exponent,
    region_necessary_averaging,
    region_necessary_extension,
    region_sufficient_averaging,
    run_sweep,
    scheme_form,
    svg_loglog,
    witness_slopes,
)


@given(st.floats(-3, 3), st.floats(0.1, 10))
def test_fit_recovers_exact_power_law(slope, c):
    qs = [3, 5, 7, 11, 13]
    fit = fit_exponent(qs, [c * q**slope for q in qs])
    assert math.isclose(fit.slope, slope, abs_tol=1e-9)
    assert math.isclose(fit.intercept, math.log(c), abs_tol=1e-9)
    assert fit.max_residual < 1e-9


def test_fit_errors():
    with pytest.raises(TooFewPoints):
        fit_exponent([3, 5], [1, 2])
    with pytest.raises(NonPositiveValue):
        fit_exponent([3, 5, 7], [1, 0, 2])


def test_schemes():
    assert scheme_form("alternating", 4, 7).coeffs == (1, 6, 1, 6)
    assert scheme_form("ones", 3, 9).coeffs == (1, 1, 1)
    assert scheme_form("explicit", 2, 9, [(0, 1), 2]).coeffs == (3, 2)
    cone = scheme_form("cone", 4, 9)
    assert cone.is_diagonal and all(c != 0 for c in cone.coeffs)
    with pytest.raises(BadScheme):
        scheme_form("cone", 2, 5)
    with pytest.raises(BadScheme):
        scheme_form("explicit", 3, 5, [1, 2])
    with pytest.raises(BadScheme):
        scheme_form("nope", 3, 5)


def test_derived_seed_is_deterministic_and_keyed():
    assert derived_seed(7, 3) == derived_seed(7, 3)
    assert len({derived_seed(7, q) for q in range(50)}) == 50
    assert derived_seed(7, 3) != derived_seed(8, 3)


def test_sweep_reproducible_and_exact_method():
    a = run_sweep([3, 5, 7], 3, "alternating", "extension", 2, 4, "ascent", seed=5, restarts=2)
    b = run_sweep([7, 5, 3], 3, "alternating", "extension", 2, 4, "ascent", seed=5, restarts=2)
    assert a.to_json() == b.to_json()
    ex = run_sweep([3, 5, 7], 2, "alternating", "averaging", 2, 2, "exact")
    assert np.allclose(ex.values, 1.0)
    w = run_sweep([3, 5, 7], 3, "alternating", "extension", 2, 4, "witness", witness="constant")
    assert [r.label for r in w.rows] == ["constant"] * 3
    with pytest.raises(ValidationError):
        run_sweep([3], 3, "ones", "extension", 2, 4, "witness", witness="Omega")
    with pytest.raises(ValidationError):
        run_sweep([3], 3, "ones", "extension", 2, 4, "bogus")


def test_unit_square_clipping():
    reg = ExponentRegion.from_halfplanes("x+y<=1", [HalfPlane(F(1), F(1), F(1))])
    assert set(reg.vertices) == {(0, 0), (1, 0), (0, 1)}
    assert reg.contains(F(1, 2), F(1, 2)) and not reg.contains(F(1, 2), F(1, 2), strict=True)
    assert reg.violated(1, 1) != []


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_necessary_averaging_region_vertices(d):
    reg = region_necessary_averaging(d)
    assert set(reg.vertices) == {(0, 0), (0, 1), (1, 1), (F(d, d + 1), F(1, d + 1))}


@pytest.mark.parametrize("d", [3, 4, 5, 6, 7])
def test_subspace_vertices_lie_on_the_cut(d):
    for k in range(1, d):
        if not 2 * k > d - 1:
            continue
        reg = region_necessary_averaging(d, k)
        s = F(d - 1 - k, d - k)
        for x, y in averaging_subspace_vertices(d, k):
            assert y == x - s
            assert reg.contains(x, y)
        (x1, y1), (x2, y2) = averaging_subspace_vertices(d, k)
        assert d * x1 - y1 == d - 1 and x2 == d * y2


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_sufficient_region_inside_necessary_region(d):
    nec, suf = region_necessary_averaging(d), region_sufficient_averaging(d)
    assert all(nec.contains(x, y) for x, y in suf.vertices)
    if d % 2:
        assert set(suf.vertices) == set(nec.vertices)


def test_extension_regions():
    reg = region_necessary_extension(3)
    assert set(reg.vertices) == {(0, 0), (1, 0), (F(1, 2), F(1, 3)), (0, F(1, 3))}
    assert reg.contains(F(1, 2), F(1, 4)) and not reg.contains(F(1, 2), F(2, 5))
    # even d adds r >= (2d-2)/(d-2): at d = 4 that is r >= 3
    assert region_necessary_extension(4).contains(F(1, 2), F(1, 3))
    assert not region_necessary_extension(4).contains(F(1, 2), F(1, 3) + F(1, 100))
    assert region_necessary_extension(2).contains(F(1, 2), 0)
    assert not region_necessary_extension(2).contains(F(1, 2), F(1, 100))
    with pytest.raises(BadDimension):
        region_necessary_extension(1)
    with pytest.raises(BadSubspaceDim):
        region_necessary_extension(3, k=2)
    with pytest.raises(BadSubspaceDim):
        region_necessary_averaging(4, k=1)


@given(st.integers(3, 8), st.fractions(0, 1), st.fractions(0, 1))
def test_subspace_constraint_only_shrinks_region(d, x, y):
    k = (d - 1) // 2
    if k < 1:
        return
    if region_necessary_extension(d, k).contains(x, y):
        assert region_necessary_extension(d).contains(x, y)


def test_regions_serialize():
    doc = region_sufficient_averaging(4).to_json()
    assert doc["vertices"] and all(isinstance(v, str) for pair in doc["vertices"] for v in pair)


def test_witness_slopes_match_region_far_outside_and_inside():
    qs = [3, 5, 7, 11, 13]
    # (p, r) = (2, 2.5) violates r >= 2d/(d-1) = 3 at d = 3: some witness grows
    assert max(witness_slopes("extension", 3, "alternating", qs, 2, 2.5).values()) > 0.1
    # deep inside the admissible range every witness stays bounded
    assert max(witness_slopes("extension", 3, "alternating", qs, 2, 8).values()) < 0.05


def test_svg_is_well_formed():
    sw = run_sweep([3, 5, 7], 3, "alternating", "extension", 2, 4, "witness", witness="constant")
    root = ET.fromstring(svg_loglog(sw, "extension (2 -> 4) <d=3>"))
    assert root.tag.endswith("svg")
    assert len([e for e in root if e.tag.endswith("circle")]) == 3
