"""Arithmetic in F_q for odd prime powers q = p**n.

Elements are encoded as integers in ``[0, q)``: the base-p digits of the
encoding are the coefficients (lowest degree first) of the residue
polynomial modulo the field's irreducible modulus.  All arithmetic goes
through precomputed ``q x q`` lookup tables, so numpy index arrays can be
pushed through ``field.add[a, b]`` / ``field.mul[a, b]`` directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DivisionByZero,
    EvenCharacteristic,
    MixedFields,
    NonPrime,
    ReducibleModulus,
    ValidationError,
)

# Smallest-encoding monic irreducible polynomials, coefficients lowest degree first.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (3, 2): (1, 0, 1),
    (3, 3): (1, 0, 2, 1),
    (5, 2): (1, 1, 1),
    (5, 3): (1, 0, 1, 1),
    (7, 2): (1, 0, 1),
    (7, 3): (1, 0, 1, 1),
    (11, 2): (1, 0, 1),
    (11, 3): (1, 0, 4, 1),
    (13, 2): (1, 3, 1),
    (13, 3): (1, 0, 4, 1),
}

MAX_ORDER = 1 << 12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` into ``(p, n)`` with ``q == p**n``.

    Raises EvenCharacteristic for powers of two and NonPrime when ``q`` is
    not a prime power at all.
    """
    if q < 2:
        raise NonPrime(f"q={q} is not a prime power")
    p = next(f for f in range(2, q + 1) if q % f == 0)
    n, rest = 0, q
    while rest % p == 0:
        rest //= p
        n += 1
    if rest != 1:
        raise NonPrime(f"q={q} is not a prime power")
    if p == 2:
        raise EvenCharacteristic(f"q={q} has characteristic 2; odd characteristic required")
    return p, n


def _poly_mod(c: list[int], m: tuple[int, ...], p: int) -> list[int]:
    c = [x % p for x in c]
    deg_m = len(m) - 1
    for top in range(len(c) - 1, deg_m - 1, -1):
        coef = c[top]
        if coef:
            for i in range(deg_m + 1):
                c[top - deg_m + i] = (c[top - deg_m + i] - coef * m[i]) % p
    return c[:deg_m] + [0] * max(0, deg_m - len(c))


def _is_irreducible(m: tuple[int, ...], p: int) -> bool:
    n = len(m) - 1
    # trial division by every monic polynomial of degree 1..n//2
    for k in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            if _poly_mod(list(m), tuple(low) + (1,), p) == [0] * k:
                return False
    return True


def _vpow(mul: np.ndarray, xs: np.ndarray, e: int, one: int = 1) -> np.ndarray:
    result = np.full_like(xs, one)
    base = xs.copy()
    while e:
        if e & 1:
            result = mul[result, base]
        base = mul[base, base]
        e >>= 1
    return result


class FiniteField:
    """The field F_q, q = p**n with p an odd prime.

    Construct through :func:`build_field`.  Instances are immutable; the
    lookup tables are read-only numpy arrays.
    """

    def __init__(self, p: int, n: int, modulus: tuple[int, ...] | None):
        self.p = p
        self.n = n
        self.q = p**n
        self.modulus = modulus
        self._build_tables()

    def _build_tables(self) -> None:
        p, n, q = self.p, self.n, self.q
        idx = np.arange(q)
        digits = np.stack([(idx // p**i) % p for i in range(n)], axis=1)
        weights = p ** np.arange(n)
        self.digits_table = digits
        add_digits = (digits[:, None, :] + digits[None, :, :]) % p
        add = add_digits @ weights
        neg = ((-digits) % p) @ weights
        if n == 1:
            mul = np.outer(idx, idx) % p
        else:
            m = self.modulus
            prod = np.zeros((q, q, 2 * n - 1), dtype=np.int64)
            for i in range(n):
                for j in range(n):
                    prod[:, :, i + j] += digits[:, None, i] * digits[None, :, j]
            prod %= p
            for top in range(2 * n - 2, n - 1, -1):
                coef = prod[:, :, top].copy()
                for i in range(n + 1):
                    prod[:, :, top - n + i] = (prod[:, :, top - n + i] - coef * m[i]) % p
            mul = prod[:, :, :n] @ weights
        self.add = add.astype(np.int64)
        self.mul = mul.astype(np.int64)
        self.neg = neg.astype(np.int64)
        self.sub = self.add[:, self.neg]
        inv = np.full(q, -1, dtype=np.int64)
        nz, partners = np.nonzero(self.mul == 1)
        inv[nz] = partners
        self.inv = inv
        # Frobenius x -> x**p; trace = sum of the n conjugates, lands in F_p
        frob = _vpow(self.mul, idx.astype(np.int64), p)
        tr = idx.astype(np.int64)
        conj = idx.astype(np.int64)
        for _ in range(n - 1):
            conj = frob[conj]
            tr = self.add[tr, conj]
        if np.any(tr >= p):
            raise ReducibleModulus("trace left the prime subfield; modulus is not irreducible")
        self.trace = tr
        self.chi = np.exp(2j * np.pi * tr / p)
        half = _vpow(self.mul, idx.astype(np.int64), (q - 1) // 2)
        eta = np.zeros(q, dtype=np.int64)
        eta[1:] = np.where(half[1:] == 1, 1, -1)
        self.eta = eta
        sq = self.mul[idx, idx]
        sqrt = np.full(q, -1, dtype=np.int64)
        # reversed so the smallest root wins
        sqrt[sq[::-1]] = idx[::-1]
        self.sqrt = sqrt
        for arr in (self.digits_table, self.add, self.mul, self.neg, self.sub, self.inv,
                    self.trace, self.chi, self.eta, self.sqrt):
            arr.setflags(write=False)

    # scalar/array helpers on encodings
    def inverse(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise DivisionByZero("0 has no multiplicative inverse")
        out = self.inv[a]
        return int(out) if out.ndim == 0 else out

    def div(self, a, b):
        return self.mul[a, self.inverse(b)]

    def power(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inverse(a), -e
        return int(_vpow(self.mul, np.asarray([a]), e)[0])

    def from_int(self, value: int) -> int:
        """Encoding of the integer ``value`` mapped into the prime subfield."""
        return int(value) % self.p

    def encode_digits(self, digits) -> int:
        digits = list(digits)
        if len(digits) != self.n or any(not 0 <= d < self.p for d in digits):
            raise ValidationError(f"digits {digits} invalid for F_{self.q}")
        return sum(d * self.p**i for i, d in enumerate(digits))

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise MixedFields("element belongs to another field")
            return value
        if isinstance(value, (tuple, list)):
            return FieldElement(self, self.encode_digits(value))
        value = int(value)
        if not 0 <= value < self.q:
            raise ValidationError(f"encoding {value} outside [0, {self.q})")
        return FieldElement(self, value)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, v) for v in range(self.q)]

    @cached_property
    def character_matrix(self) -> np.ndarray:
        """``C[x, m] = chi(x m)``; symmetric."""
        return self.chi[self.mul]

    @cached_property
    def squares(self) -> np.ndarray:
        """Encodings of the nonzero squares, ascending."""
        return np.nonzero(self.eta == 1)[0]

    @property
    def key(self) -> tuple:
        return (self.p, self.n, self.modulus)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        if self.n == 1:
            return f"FiniteField(q={self.q})"
        return f"FiniteField(q={self.q}, modulus={self.modulus})"

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "q": self.q,
                "modulus": list(self.modulus) if self.modulus else None}


_FIELD_CACHE: dict[tuple, FiniteField] = {}


def build_field(p: int, n: int = 1, modulus=None) -> FiniteField:
    """Return the field F_{p**n}.

    ``modulus`` lists the coefficients of a monic irreducible polynomial of
    degree ``n``, lowest degree first (``t**2 + 1`` is ``(1, 0, 1)``).  It
    may be omitted for ``p <= 13, n <= 3``.
    """
    if p == 2:
        raise EvenCharacteristic("characteristic 2 is not supported")
    if not is_prime(p):
        raise NonPrime(f"p={p} is not prime")
    if n < 1:
        raise ValidationError(f"extension degree must be >= 1, got {n}")
    if p**n > MAX_ORDER:
        raise ValidationError(f"q={p**n} exceeds the supported maximum {MAX_ORDER}")
    if n == 1:
        modulus = None
    else:
        if modulus is None:
            if (p, n) not in DEFAULT_MODULI:
                raise ValidationError(f"no default modulus for p={p}, n={n}; pass one")
            modulus = DEFAULT_MODULI[(p, n)]
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise ReducibleModulus(f"modulus must be monic of degree {n}: {modulus}")
        if not _is_irreducible(modulus, p):
            raise ReducibleModulus(f"modulus {modulus} is reducible over F_{p}")
    key = (p, n, modulus)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FiniteField(p, n, modulus)
    return _FIELD_CACHE[key]


def field_of_order(q: int, modulus=None) -> FiniteField:
    p, n = prime_power(q)
    return build_field(p, n, modulus)


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValidationError(f"encoding {self.value} outside F_{self.field.q}")

    @property
    def digits(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.field.digits_table[self.value])

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise MixedFields("operands belong to different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return NotImplemented

    def _wrap(self, v) -> "FieldElement":
        return FieldElement(self.field, int(v))

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add[self.value, o])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub[self.value, o])

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub[o, self.value])

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul[self.value, o])

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(self.field.neg[self.value])

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inverse(self.value))

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self._wrap(self.field.mul[self.value, self.field.inverse(o)])

    def __pow__(self, e: int):
        return self._wrap(self.field.power(self.value, e))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        if self.field.n == 1:
            return f"F{self.field.q}({self.value})"
        return f"F{self.field.q}{self.digits}"


def element_arithmetic(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Apply ``op`` in {'add', 'mul', 'neg', 'inv'}; unary ops ignore ``b``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValidationError(f"unknown op {op!r}")


def additive_character(x: FieldElement) -> complex:
    """chi(x) = exp(2 pi i Tr(x) / p)."""
    return complex(x.field.chi[x.value])


def trace(x: FieldElement) -> int:
    return int(x.field.trace[x.value])


def quadratic_character(x: FieldElement) -> int:
    return int(x.field.eta[x.value])


def sqrt_element(x: FieldElement) -> FieldElement | None:
    """Smallest-encoding square root of ``x``, or None for non-squares."""
    r = int(x.field.sqrt[x.value])
    return None if r < 0 else FieldElement(x.field, r)


__all__ = [
    "DEFAULT_MODULI", "FiniteField", "FieldElement", "build_field", "field_of_order",
    "prime_power", "is_prime", "element_arithmetic", "additive_character",
    "quadratic_character", "sqrt_element", "trace",
]
