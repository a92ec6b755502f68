"""Gauss sums and the complete-square identities, by direct summation and closed form."""

from __future__ import annotations

import numpy as np

from .errors import ZeroLeadingCoefficient
from .field import FieldElement, FiniteField


def _enc(x) -> int:
    return x.value if isinstance(x, FieldElement) else int(x)


def gauss_sum(t, field: FiniteField) -> complex:
    """G_t = sum over s != 0 of eta(s) chi(t s)."""
    t = _enc(t)
    s = np.arange(1, field.q)
    return complex(np.sum(field.eta[s] * field.chi[field.mul[t, s]]))


def square_character_sum(t, field: FiniteField | None = None) -> complex:
    """Sum over all s of chi(t s^2)."""
    if field is None:
        field = t.field
    t = _enc(t)
    s = np.arange(field.q)
    return complex(np.sum(field.chi[field.mul[t, field.mul[s, s]]]))


def complete_square_sum(a, b, field: FiniteField | None = None) -> complex:
    """Sum over all s of chi(a s^2 + b s), by direct summation."""
    if field is None:
        field = a.field
    a, b = _enc(a), _enc(b)
    if a == 0:
        raise ZeroLeadingCoefficient("leading coefficient a must be nonzero")
    s = np.arange(field.q)
    arg = field.add[field.mul[a, field.mul[s, s]], field.mul[b, s]]
    return complex(np.sum(field.chi[arg]))


def complete_square_closed_form(a, b, field: FiniteField | None = None) -> complex:
    """G_1 eta(a) chi(-b^2 / (4a)), the value predicted for :func:`complete_square_sum`."""
    if field is None:
        field = a.field
    a, b = _enc(a), _enc(b)
    if a == 0:
        raise ZeroLeadingCoefficient("leading coefficient a must be nonzero")
    four_a = field.mul[field.from_int(4), a]
    arg = field.neg[field.mul[field.mul[b, b], field.inverse(four_a)]]
    return gauss_sum(1, field) * int(field.eta[a]) * complex(field.chi[arg])
