"""Extension, restriction and averaging over a quadric, plus the kernels built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import NegativeInput, NotIndicator, ValidationError
from .fourier import character_sum, inverse_transform, sigma_inv, transform_dual, transform_primal
from .grid import DUAL, PRIMAL, GridFunction, check_exponent, decode, encode, weighted_norm
from .variety import Variety, surface_measure


@dataclass(frozen=True, eq=False)
class SurfaceFunction:
    """Function on S, stored in the order of ``variety.indices``; measure d sigma."""

    variety: Variety
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if vals.size != self.variety.cardinality:
            raise ValidationError(f"expected {self.variety.cardinality} values, got {vals.size}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def weight(self) -> float:
        return 1.0 / self.variety.cardinality

    def norm(self, p: float) -> float:
        return weighted_norm(self.values, p, self.weight)

    def to_grid(self) -> np.ndarray:
        """Values spread onto the full grid, zero off S."""
        v = self.variety
        out = np.zeros(v.q**v.d, dtype=np.complex128)
        out[v.indices] = self.values
        return out

    @classmethod
    def constant(cls, v: Variety, c: complex = 1.0) -> "SurfaceFunction":
        return cls(v, np.full(v.cardinality, c, dtype=np.complex128))

    @classmethod
    def from_grid(cls, v: Variety, values) -> "SurfaceFunction":
        return cls(v, np.asarray(values).reshape(-1)[v.indices])


def extend(f: SurfaceFunction) -> GridFunction:
    """(f d sigma)^vee(m) = |S|^-1 sum_{x in S} f(x) chi(x.m)."""
    v = f.variety
    vals = character_sum(f.to_grid(), v.field, v.d, +1) / v.cardinality
    return GridFunction(DUAL, v.field, v.d, vals)


def restrict(g: GridFunction, v: Variety) -> SurfaceFunction:
    """g^ sampled on S; the adjoint of :func:`extend` for the d sigma / dm pairings."""
    return SurfaceFunction(v, transform_dual(g).values[v.indices])


def average(f: GridFunction, v: Variety, method: str = "direct") -> GridFunction:
    """f * d sigma (x) = |S|^-1 sum_{y in S} f(x - y).

    ``direct`` sums the |S| shifts; ``fft`` multiplies f^ by (d sigma)^vee.
    """
    if f.side != PRIMAL:
        raise ValidationError("average acts on primal functions")
    if method == "fft":
        return average_multiplier(f, sigma_inv(v))
    if method != "direct":
        raise ValidationError(f"unknown method {method!r}")
    field, q, d = v.field, v.q, v.d
    pts = decode(np.arange(q**d), q, d)
    out = np.zeros(q**d, dtype=np.complex128)
    for y in v.points:
        out += f.values[encode(field.sub[pts, y], q)]
    return f.like(out / v.cardinality)


def average_multiplier(f: GridFunction, sigma_vee: GridFunction) -> GridFunction:
    """Averaging through a precomputed multiplier; (d sigma)^vee is even, so no reflection."""
    return inverse_transform(transform_primal(f) * sigma_vee)


def kernel_K(v: Variety) -> GridFunction:
    """(d sigma)^vee - delta_0."""
    vals = sigma_inv(v).values.copy()
    vals[0] = 0.0
    return GridFunction(DUAL, v.field, v.d, vals)


def k_hat(v: Variety) -> GridFunction:
    """sigma - 1 on the primal grid."""
    return surface_measure(v) - GridFunction.constant(PRIMAL, v.field, v.d)


def _indicator_values(E: GridFunction) -> np.ndarray:
    vals = E.values
    if np.any(vals.imag != 0) or np.any((vals.real != 0) & (vals.real != 1)):
        raise NotIndicator("expected a 0/1-valued function")
    return vals.real


def restriction_energy(E: GridFunction, v: Variety) -> float:
    """sum over m in S of |E^(m)|^2, with E^ = transform_primal(E)."""
    if E.side != PRIMAL:
        raise ValidationError("E must be a primal indicator")
    _indicator_values(E)
    hat = transform_primal(E).values[v.indices]
    return float(np.sum(np.abs(hat) ** 2))


# ---------------------------------------------------------------------------


def dyadic_cutoff(q: int, d: int, p: float) -> int:
    """Smallest N >= 0 with 2^-(N+1) <= q^(-d/p)."""
    p = check_exponent(p)
    if p == math.inf:
        return 0
    n = max(0, math.ceil(d * math.log2(q) / p) - 1)
    # guard the float ceiling in both directions
    while 2.0 ** -(n + 1) > q ** (-d / p):
        n += 1
    while n > 0 and 2.0 ** -n <= q ** (-d / p):
        n -= 1
    return n


@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    """f = sum_k levels[k] + tail with levels[k] = f on {2^-k-1 < f/|f|_inf <= 2^-k}."""

    levels: list
    tail: GridFunction
    level_sets: list
    scale: float

    @property
    def N(self) -> int:
        return len(self.levels) - 1

    def reconstruct(self) -> GridFunction:
        out = self.tail
        for fk in self.levels:
            out = out + fk
        return out


def dyadic_decompose(f: GridFunction, levels: int) -> DyadicDecomposition:
    """Split a nonnegative f into dyadic level pieces 0..levels and a tail."""
    vals = f.values
    if np.any(vals.imag != 0) or np.any(vals.real < 0):
        raise NegativeInput("dyadic decomposition needs a nonnegative real function")
    if levels < 0:
        raise ValidationError("levels must be >= 0")
    real = vals.real
    scale = float(real.max()) if real.size else 0.0
    u = real / scale if scale > 0 else real
    pieces, sets = [], []
    claimed = np.zeros(real.size, dtype=bool)
    for k in range(levels + 1):
        mask = (u > 2.0 ** (-k - 1)) & (u <= 2.0**-k)
        claimed |= mask
        sets.append(GridFunction(f.side, f.field, f.d, mask.astype(float)))
        pieces.append(f.like(np.where(mask, real, 0.0)))
    tail = f.like(np.where(claimed, 0.0, real))
    return DyadicDecomposition(pieces, tail, sets, scale)


__all__ = [
    "SurfaceFunction", "extend", "restrict", "average", "average_multiplier", "kernel_K",
    "k_hat", "restriction_energy", "dyadic_cutoff", "dyadic_decompose", "DyadicDecomposition",
]
