"""Measure-aware Fourier transforms on F_q^d and the closed form of (d sigma)^vee.

Conventions: functions of ``m`` live on the dual side (counting measure dm),
functions of ``x`` on the primal side (normalized measure dx).

    transform_dual(g)(x)      = sum_m chi(-m.x) g(m)
    transform_primal(f)(m)    = q^-d sum_x chi(-x.m) f(x)
    inverse_transform(g)(x)   = sum_m chi(m.x) g(m)
    vee(f)(m)                 = q^-d sum_x chi(x.m) f(x)

Every transform is a sequence of d one-dimensional passes.  Prime fields
use numpy's FFT (chi(xm) = exp(2 pi i xm / p)); extension fields use the
dense q x q character matrix.
"""

from __future__ import annotations

import numpy as np

from .charsums import gauss_sum
from .errors import SideMismatch, ValidationError
from .field import FiniteField
from .grid import DUAL, PRIMAL, GridFunction, _same, decode, weighted_norm
from .variety import QuadraticForm, Variety, enumerate_variety, variety_cardinality

DIRECT_LIMIT = 2 * 10**7


def character_sum(values: np.ndarray, field: FiniteField, d: int, sign: int, dense: bool = False) -> np.ndarray:
    """``sum_m chi(sign * m.x) values[m]`` for every x, as a flat array."""
    q = field.q
    cube = np.asarray(values, dtype=np.complex128).reshape((q,) * d)
    if field.n == 1 and not dense:
        if sign < 0:
            out = np.fft.fftn(cube)
        else:
            out = np.fft.ifftn(cube) * q**d
        return out.reshape(-1)
    C = field.character_matrix if sign > 0 else np.conj(field.character_matrix)
    out = cube
    for axis in range(d):
        out = np.moveaxis(np.tensordot(C, out, axes=([1], [axis])), 0, axis)
    return out.reshape(-1)


def _need(h: GridFunction, side: str) -> None:
    if h.side != side:
        raise SideMismatch(f"expected a {side} function, got {h.side}")


def transform_dual(g: GridFunction) -> GridFunction:
    _need(g, DUAL)
    return GridFunction(PRIMAL, g.field, g.d, character_sum(g.values, g.field, g.d, -1))


def transform_primal(f: GridFunction) -> GridFunction:
    _need(f, PRIMAL)
    vals = character_sum(f.values, f.field, f.d, -1) * f.q ** -f.d
    return GridFunction(DUAL, f.field, f.d, vals)


def inverse_transform(g: GridFunction) -> GridFunction:
    _need(g, DUAL)
    return GridFunction(PRIMAL, g.field, g.d, character_sum(g.values, g.field, g.d, +1))


def vee(f: GridFunction) -> GridFunction:
    _need(f, PRIMAL)
    vals = character_sum(f.values, f.field, f.d, +1) * f.q ** -f.d
    return GridFunction(DUAL, f.field, f.d, vals)


def lp_norm(h: GridFunction, p: float) -> float:
    return weighted_norm(h.values, p, h.weight)


def convolve(f: GridFunction, h: GridFunction) -> GridFunction:
    """Convolution under the side's own measure, via the convolution theorem."""
    _same(f, h)
    if f.side == PRIMAL:
        return inverse_transform(transform_primal(f) * transform_primal(h))
    fh, hh = transform_dual(f), transform_dual(h)
    return vee(fh * hh)


def convolve_direct(f: GridFunction, h: GridFunction) -> GridFunction:
    """Direct-sum convolution, O(q^(2d)); for cross-checking :func:`convolve`."""
    _same(f, h)
    field, q, d = f.field, f.q, f.d
    pts = decode(np.arange(q**d), q, d)
    out = np.zeros(q**d, dtype=np.complex128)
    weights = q ** np.arange(d - 1, -1, -1)
    for y in range(q**d):
        hy = h.values[y]
        if hy == 0:
            continue
        shifted = field.sub[pts, pts[y]] @ weights
        out += f.values[shifted] * hy
    if f.side == PRIMAL:
        out *= q**-d
    return f.like(out)


# ---------------------------------------------------------------------------


def sigma_inv_bruteforce(v: Variety, method: str = "auto") -> GridFunction:
    """(d sigma)^vee(m) = |S|^-1 sum_{x in S} chi(x.m) with no Gauss sums.

    ``direct`` evaluates every character chi(x.m) for x in S (chunked over m);
    ``separable`` sums the indicator of S one coordinate at a time.  ``auto``
    picks ``direct`` while |S| q^d stays under DIRECT_LIMIT.
    """
    field, q, d = v.field, v.q, v.d
    if method == "auto":
        method = "direct" if v.cardinality * q**d <= DIRECT_LIMIT else "separable"
    if method == "separable":
        ind = np.zeros(q**d)
        ind[v.indices] = 1.0
        vals = character_sum(ind, field, d, +1, dense=True) / v.cardinality
        return GridFunction(DUAL, field, d, vals)
    if method != "direct":
        raise ValidationError(f"unknown method {method!r}")
    S = v.points
    out = np.empty(q**d, dtype=np.complex128)
    chunk = max(1, DIRECT_LIMIT // (4 * max(1, v.cardinality)))
    for start in range(0, q**d, chunk):
        m = decode(np.arange(start, min(q**d, start + chunk)), q, d)
        acc = np.zeros((m.shape[0], S.shape[0]), dtype=np.int64)
        for j in range(d):
            acc = field.add[acc, field.mul[m[:, j][:, None], S[:, j][None, :]]]
        out[start : start + m.shape[0]] = field.chi[acc].sum(axis=1)
    return GridFunction(DUAL, field, d, out / v.cardinality)


def dual_form_values(form: QuadraticForm) -> np.ndarray:
    """Q*(m) = sum m_j^2 / a_j on the whole grid."""
    return form.dual().grid_values()


def sigma_inv_closed_form(form: QuadraticForm) -> GridFunction:
    """(d sigma)^vee from the Gauss-sum formula; needs a diagonal form."""
    coeffs = form.require_diagonal()
    f, q, d = form.field, form.field.q, form.d
    size = variety_cardinality(form)
    g1 = gauss_sum(1, f)
    prod = 1
    for c in coeffs:
        prod = int(f.mul[prod, c])
    qstar = dual_form_values(form)
    out = np.empty(q**d, dtype=np.complex128)
    on_cone = qstar == 0
    if d % 2:
        eta_neg = int(f.eta[f.neg[prod]])
        out[:] = g1 ** (d + 1) / (q * size) * eta_neg * f.eta[qstar]
        out[on_cone] = 0.0
        out[0] = q ** (d - 1) / size
    else:
        eta_prod = int(f.eta[prod])
        out[:] = -(g1**d) / (q * size) * eta_prod
        out[on_cone] = g1**d / size * (1 - 1 / q) * eta_prod
        out[0] = q ** (d - 1) / size + g1**d / size * (1 - 1 / q) * eta_prod
    return GridFunction(DUAL, f, d, out)


def sigma_inv(v: Variety) -> GridFunction:
    """(d sigma)^vee for an enumerated surface, through the Fourier engine."""
    ind = np.zeros(v.q**v.d)
    ind[v.indices] = 1.0
    vals = character_sum(ind, v.field, v.d, +1) / v.cardinality
    return GridFunction(DUAL, v.field, v.d, vals)


def decay_max(v: Variety, sigma_vee: GridFunction | None = None) -> float:
    """max over m != 0 of |(d sigma)^vee(m)|."""
    s = sigma_inv(v) if sigma_vee is None else sigma_vee
    return float(np.abs(s.values[1:]).max())


def predicted_decay(form: QuadraticForm) -> float:
    """q^(-(d-1)/2) for odd d; q^(d/2-1)(q-1)/|S| for even d.

    An anisotropic plane (d = 2, |S| = 1) has no m != 0 with Q*(m) = 0, and
    the maximum drops to q^(d/2-1)/|S|.
    """
    q, d = form.field.q, form.d
    if d % 2:
        return q ** (-(d - 1) / 2)
    size = variety_cardinality(form)
    if size == 1:
        return q ** (d / 2 - 1) / size
    return q ** (d / 2 - 1) * (q - 1) / size


__all__ = [
    "character_sum", "transform_dual", "transform_primal", "inverse_transform", "vee",
    "lp_norm", "convolve", "convolve_direct", "sigma_inv_bruteforce",
    "sigma_inv_closed_form", "sigma_inv", "decay_max", "predicted_decay",
    "dual_form_values",
]
