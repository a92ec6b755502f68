"""Dense functions on F_q^d and point/index bookkeeping.

A point ``x = (x_1, ..., x_d)`` of F_q^d is stored at flat index
``sum_j x_j * q**(d-1-j)``, i.e. C order of an array of shape ``(q,)*d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import BadExponent, GridTooLarge, SideMismatch, ValidationError
from .field import FiniteField

PRIMAL = "primal"  # normalized counting measure dx, mass q**-d per point
DUAL = "dual"  # counting measure dm

DEFAULT_GUARD = 1 << 24


def check_grid(q: int, d: int, guard: int = DEFAULT_GUARD) -> None:
    if q**d > guard:
        raise GridTooLarge(f"q^d = {q}^{d} = {q**d} exceeds the guard {guard}")


def encode(points: np.ndarray, q: int) -> np.ndarray:
    points = np.asarray(points, dtype=np.int64)
    d = points.shape[-1]
    weights = q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return points @ weights


def decode(indices, q: int, d: int) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64)
    out = np.empty(indices.shape + (d,), dtype=np.int64)
    rest = indices.copy()
    for j in range(d - 1, -1, -1):
        out[..., j] = rest % q
        rest //= q
    return out


def all_points(q: int, d: int) -> np.ndarray:
    return decode(np.arange(q**d), q, d)


def check_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise BadExponent(f"exponent must lie in [1, inf], got {p}")
    return p


def weighted_norm(values: np.ndarray, p: float, weight: float) -> float:
    """(weight * sum |v|^p)^(1/p); the max for p = inf."""
    p = check_exponent(p)
    a = np.abs(values)
    if p == math.inf:
        return float(a.max()) if a.size else 0.0
    m = a.max() if a.size else 0.0
    if m == 0:
        return 0.0
    # scale by the max to keep large p from overflowing
    return float(m * (weight * np.sum((a / m) ** p)) ** (1.0 / p))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex function on F_q^d tagged with its measure side."""

    side: str
    field: FiniteField
    d: int
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        if self.side not in (PRIMAL, DUAL):
            raise ValidationError(f"side must be 'primal' or 'dual', got {self.side!r}")
        vals = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if vals.size != self.field.q**self.d:
            raise ValidationError(f"expected {self.field.q ** self.d} values, got {vals.size}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def weight(self) -> float:
        return self.q ** -self.d if self.side == PRIMAL else 1.0

    def norm(self, p: float) -> float:
        return weighted_norm(self.values, p, self.weight)

    def at(self, point) -> complex:
        return complex(self.values[int(encode(np.asarray(point), self.q))])

    def cube(self) -> np.ndarray:
        return self.values.reshape((self.q,) * self.d)

    def like(self, values) -> "GridFunction":
        return GridFunction(self.side, self.field, self.d, values)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _same(self, other)
        return self.like(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _same(self, other)
        return self.like(self.values - other.values)

    def __mul__(self, other) -> "GridFunction":
        if isinstance(other, GridFunction):
            _same(self, other)
            return self.like(self.values * other.values)
        return self.like(self.values * other)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, side: str, field: FiniteField, d: int) -> "GridFunction":
        return cls(side, field, d, np.zeros(field.q**d, dtype=np.complex128))

    @classmethod
    def constant(cls, side: str, field: FiniteField, d: int, c: complex = 1.0) -> "GridFunction":
        return cls(side, field, d, np.full(field.q**d, c, dtype=np.complex128))

    @classmethod
    def delta(cls, side: str, field: FiniteField, d: int, point=None, c: complex = 1.0) -> "GridFunction":
        v = np.zeros(field.q**d, dtype=np.complex128)
        idx = 0 if point is None else int(encode(np.asarray(point), field.q))
        v[idx] = c
        return cls(side, field, d, v)

    @classmethod
    def indicator(cls, side: str, field: FiniteField, d: int, indices) -> "GridFunction":
        v = np.zeros(field.q**d, dtype=np.complex128)
        v[np.asarray(indices, dtype=np.int64)] = 1.0
        return cls(side, field, d, v)


def _same(a: GridFunction, b: GridFunction) -> None:
    if a.side != b.side:
        raise SideMismatch(f"cannot combine {a.side} and {b.side} functions")
    if a.field != b.field or a.d != b.d:
        raise ValidationError("functions live on different grids")
