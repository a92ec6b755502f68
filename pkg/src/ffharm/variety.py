"""Quadratic forms over F_q and their zero sets.

The surface is ``S = {x : Q(x) = 0}`` for a nondegenerate form Q, normally
diagonal ``a_1 x_1^2 + ... + a_d x_d^2``.  Forms with cross terms (the cone
``x_1^2 + ... + x_{d-2}^2 - x_{d-1} x_d``, the transformed surface used by the
Omega witness) carry a Gram matrix and can be brought to diagonal shape with
:func:`diagonalize`.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    ConstructionInapplicable,
    DegenerateForm,
    NoSquareRatio,
    NotDiagonal,
    ValidationError,
)
from .field import FieldElement, FiniteField
from .grid import DEFAULT_GUARD, PRIMAL, GridFunction, check_grid, decode, encode


def coerce_element(field: FiniteField, c) -> int:
    """Encoding of ``c``: FieldElement, digit tuple, or integer read mod p."""
    if isinstance(c, FieldElement):
        return field.element(c).value
    if isinstance(c, (tuple, list)):
        return field.encode_digits(c)
    return field.from_int(int(c))


# ---------------------------------------------------------------------------
# small linear algebra over F_q on encoding arrays


def mat_apply(field: FiniteField, M: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Rows of ``points`` mapped by x -> M x."""
    points = np.atleast_2d(np.asarray(points, dtype=np.int64))
    M = np.asarray(M, dtype=np.int64)
    out = np.zeros((points.shape[0], M.shape[0]), dtype=np.int64)
    for k in range(M.shape[0]):
        acc = np.zeros(points.shape[0], dtype=np.int64)
        for j in range(M.shape[1]):
            if M[k, j]:
                acc = field.add[acc, field.mul[M[k, j], points[:, j]]]
        out[:, k] = acc
    return out


def mat_mul(field: FiniteField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return mat_apply(field, A, np.asarray(B).T).T


def dot(field: FiniteField, points: np.ndarray, w) -> np.ndarray:
    """sum_j points[:, j] * w[j] over F_q."""
    points = np.atleast_2d(points)
    acc = np.zeros(points.shape[0], dtype=np.int64)
    for j, wj in enumerate(w):
        if wj:
            acc = field.add[acc, field.mul[int(wj), points[:, j]]]
    return acc


def _reduce(field: FiniteField, rows: np.ndarray, echelon: list[tuple[int, np.ndarray]]) -> np.ndarray:
    rows = np.array(rows, dtype=np.int64, copy=True)
    for piv, b in echelon:
        c = rows[:, piv].copy()
        for j in range(rows.shape[1]):
            if b[j]:
                rows[:, j] = field.sub[rows[:, j], field.mul[c, b[j]]]
    return rows


def _extend_echelon(field: FiniteField, echelon, v: np.ndarray):
    r = _reduce(field, v[None, :], echelon)[0]
    nz = np.nonzero(r)[0]
    if nz.size == 0:
        return None
    piv = int(nz[0])
    r = field.mul[field.inverse(int(r[piv])), r]
    return echelon + [(piv, r)]


def rank(field: FiniteField, vectors) -> int:
    echelon: list = []
    for v in np.atleast_2d(np.asarray(vectors, dtype=np.int64)):
        ext = _extend_echelon(field, echelon, v)
        if ext is not None:
            echelon = ext
    return len(echelon)


def determinant(field: FiniteField, M) -> int:
    A = [list(map(int, row)) for row in np.asarray(M)]
    n = len(A)
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            det = int(field.neg[det])
        det = int(field.mul[det, A[k][k]])
        inv = field.inverse(A[k][k])
        for i in range(k + 1, n):
            c = int(field.mul[A[i][k], inv])
            if c:
                A[i] = [int(field.sub[A[i][j], field.mul[c, A[k][j]]]) for j in range(n)]
    return det


# ---------------------------------------------------------------------------


class QuadraticForm:
    """A nondegenerate quadratic form over F_q in ``d >= 2`` variables.

    Give either ``diag`` (the coefficients a_j) or a symmetric ``gram`` matrix
    G with Q(x) = x^T G x.  Entries may be FieldElements, digit tuples, or
    integers read mod p.
    """

    def __init__(self, field: FiniteField, diag=None, gram=None):
        if (diag is None) == (gram is None):
            raise ValidationError("give exactly one of diag or gram")
        self.field = field
        if diag is not None:
            coeffs = tuple(coerce_element(field, c) for c in diag)
            if len(coeffs) < 2:
                raise ValidationError("dimension d must be at least 2")
            if any(c == 0 for c in coeffs):
                raise DegenerateForm(f"zero diagonal coefficient in {coeffs}")
            G = np.zeros((len(coeffs), len(coeffs)), dtype=np.int64)
            G[np.arange(len(coeffs)), np.arange(len(coeffs))] = coeffs
        else:
            rows = [[coerce_element(field, c) for c in row] for row in gram]
            G = np.asarray(rows, dtype=np.int64)
            if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 2:
                raise ValidationError("gram must be a square matrix of size >= 2")
            if not np.array_equal(G, G.T):
                raise ValidationError("gram matrix must be symmetric")
            if determinant(field, G) == 0:
                raise DegenerateForm("gram matrix is singular")
            off = G.copy()
            np.fill_diagonal(off, 0)
            coeffs = None if off.any() else tuple(int(c) for c in np.diag(G))
        G.setflags(write=False)
        self.gram = G
        self.coeffs = coeffs

    @classmethod
    def diagonal(cls, field: FiniteField, coeffs) -> "QuadraticForm":
        return cls(field, diag=coeffs)

    @classmethod
    def from_encodings(cls, field: FiniteField, coeffs) -> "QuadraticForm":
        """Diagonal form from element encodings, as returned by :func:`diagonalize`."""
        return cls(field, diag=[FieldElement(field, int(c)) for c in coeffs])

    @property
    def d(self) -> int:
        return self.gram.shape[0]

    @property
    def is_diagonal(self) -> bool:
        return self.coeffs is not None

    def require_diagonal(self) -> tuple[int, ...]:
        if self.coeffs is None:
            raise NotDiagonal("operation needs a diagonal form; call diagonalize first")
        return self.coeffs

    def _terms(self):
        f, G = self.field, self.gram
        two = f.from_int(2)
        for i in range(self.d):
            if G[i, i]:
                yield i, i, int(G[i, i])
            for j in range(i + 1, self.d):
                if G[i, j]:
                    yield i, j, int(f.mul[two, G[i, j]])

    def evaluate(self, points) -> np.ndarray:
        f = self.field
        points = np.atleast_2d(np.asarray(points, dtype=np.int64))
        acc = np.zeros(points.shape[0], dtype=np.int64)
        for i, j, c in self._terms():
            acc = f.add[acc, f.mul[c, f.mul[points[:, i], points[:, j]]]]
        return acc

    def grid_values(self) -> np.ndarray:
        """Q at every grid point, flat in the grid's index order."""
        f, q, d = self.field, self.field.q, self.d
        x = np.arange(q)
        acc = np.zeros((q,) * d, dtype=np.int64)
        for i, j, c in self._terms():
            shape = [1] * d
            if i == j:
                shape[i] = q
                term = f.mul[c, f.mul[x, x]].reshape(shape)
            else:
                prod = f.mul[c, f.mul[x[:, None], x[None, :]]]
                shape[i], shape[j] = q, q
                term = prod.reshape(shape)
            acc = f.add[acc, term]
        return acc.reshape(-1)

    def polar(self, x, y) -> np.ndarray:
        """B(x, y) = x^T G y; vectorized over rows of ``x``."""
        w = mat_apply(self.field, self.gram, np.asarray(y)[None, :])[0]
        return dot(self.field, np.atleast_2d(x), w)

    def dual(self) -> "QuadraticForm":
        """Q*(m) = sum m_j^2 / a_j."""
        coeffs = self.require_diagonal()
        return QuadraticForm(self.field, diag=[FieldElement(self.field, int(self.field.inv[c])) for c in coeffs])

    def to_json(self) -> dict:
        out = {"q": self.field.q, "d": self.d, "field": self.field.to_json()}
        if self.coeffs is not None:
            out["coeffs"] = list(self.coeffs)
        else:
            out["gram"] = self.gram.tolist()
        return out

    def __repr__(self) -> str:
        if self.coeffs is not None:
            return f"QuadraticForm(q={self.field.q}, diag={self.coeffs})"
        return f"QuadraticForm(q={self.field.q}, gram={self.gram.tolist()})"


def diagonalize(form: QuadraticForm) -> tuple[tuple[int, ...], np.ndarray]:
    """Return ``(coeffs, P)`` with ``P^T G P = diag(coeffs)`` and P invertible.

    Points map by ``x = P y``: y lies on the diagonal surface iff P y lies on
    the original one.
    """
    f, d = form.field, form.d
    A = [list(map(int, row)) for row in form.gram]
    P = [[1 if i == j else 0 for j in range(d)] for i in range(d)]

    def col_op(dst, src, c):
        # column_dst += c * column_src, and the mirrored row op on A
        for i in range(d):
            A[i][dst] = int(f.add[A[i][dst], f.mul[c, A[i][src]]])
        for j in range(d):
            A[dst][j] = int(f.add[A[dst][j], f.mul[c, A[src][j]]])
        for i in range(d):
            P[i][dst] = int(f.add[P[i][dst], f.mul[c, P[i][src]]])

    def swap(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        A[a], A[b] = A[b], A[a]
        for row in P:
            row[a], row[b] = row[b], row[a]

    for k in range(d):
        if A[k][k] == 0:
            j = next((j for j in range(k + 1, d) if A[j][j]), None)
            if j is not None:
                swap(k, j)
            else:
                j = next((j for j in range(k + 1, d) if A[k][j]), None)
                if j is None:
                    raise DegenerateForm("form is degenerate")
                col_op(k, j, 1)  # new pivot 2 A[k][j] != 0 in odd characteristic
        inv = f.inverse(A[k][k])
        for j in range(k + 1, d):
            if A[k][j]:
                col_op(j, k, int(f.neg[f.mul[A[k][j], inv]]))
    coeffs = tuple(A[i][i] for i in range(d))
    if any(c == 0 for c in coeffs):
        raise DegenerateForm("form is degenerate")
    return coeffs, np.asarray(P, dtype=np.int64)


def cone_form(d: int, field: FiniteField) -> QuadraticForm:
    """x_1^2 + ... + x_{d-2}^2 - x_{d-1} x_d."""
    if d < 3:
        raise ValidationError("the cone needs d >= 3")
    half = int(field.neg[field.inverse(field.from_int(2))])
    G = np.zeros((d, d), dtype=np.int64)
    for i in range(d - 2):
        G[i, i] = 1
    G[d - 2, d - 1] = G[d - 1, d - 2] = half
    return QuadraticForm(field, gram=[[FieldElement(field, int(v)) for v in row] for row in G])


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Variety:
    """Enumerated zero set of a form; ``indices`` are sorted flat grid indices."""

    form: QuadraticForm
    indices: np.ndarray = dc_field(repr=False)

    @property
    def field(self) -> FiniteField:
        return self.form.field

    @property
    def q(self) -> int:
        return self.form.field.q

    @property
    def d(self) -> int:
        return self.form.d

    @property
    def cardinality(self) -> int:
        return int(self.indices.size)

    @property
    def points(self) -> np.ndarray:
        return decode(self.indices, self.q, self.d)

    def indicator(self) -> np.ndarray:
        ind = np.zeros(self.q**self.d, dtype=bool)
        ind[self.indices] = True
        return ind

    def contains(self, point) -> bool:
        return bool(self.form.evaluate(np.asarray(point)[None, :])[0] == 0)

    def to_json(self) -> dict:
        return {**self.form.to_json(), "cardinality": self.cardinality}


def enumerate_variety(form: QuadraticForm, guard: int = DEFAULT_GUARD) -> Variety:
    check_grid(form.field.q, form.d, guard)
    idx = np.nonzero(form.grid_values() == 0)[0].astype(np.int64)
    idx.setflags(write=False)
    return Variety(form, idx)


def variety_cardinality(form: QuadraticForm) -> int:
    """|S| in closed form: q^(d-1) for odd d, plus the eta-term for even d."""
    coeffs = form.coeffs if form.is_diagonal else diagonalize(form)[0]
    f, q, d = form.field, form.field.q, form.d
    if d % 2:
        return q ** (d - 1)
    prod = f.from_int(1 if (d // 2) % 2 == 0 else -1)
    for c in coeffs:
        prod = int(f.mul[prod, c])
    return q ** (d - 1) + int(f.eta[prod]) * q ** (d // 2 - 1) * (q - 1)


def surface_measure(v: Variety) -> GridFunction:
    vals = np.zeros(v.q**v.d)
    vals[v.indices] = v.q**v.d / v.cardinality
    return GridFunction(PRIMAL, v.field, v.d, vals)


# ---------------------------------------------------------------------------
# witness sets on the dual side


@dataclass(frozen=True, eq=False)
class WitnessSet:
    label: str
    field: FiniteField
    d: int
    indices: np.ndarray = dc_field(repr=False)
    side: str = "dual"
    # for Omega: L with y = L x carrying the original surface onto the transformed one
    transform: np.ndarray | None = dc_field(default=None, repr=False)

    @property
    def cardinality(self) -> int:
        return int(self.indices.size)

    @property
    def points(self) -> np.ndarray:
        return decode(self.indices, self.field.q, self.d)

    def indicator(self) -> GridFunction:
        return GridFunction.indicator("dual", self.field, self.d, self.indices)


def witness_M(form: QuadraticForm) -> WitnessSet:
    """{m : m_1^2/a_1 + ... + m_d^2/a_d = 0}."""
    dual = enumerate_variety(form.dual())
    return WitnessSet("M", form.field, form.d, dual.indices)


def find_square_ratio(form: QuadraticForm) -> tuple[int, int, int] | None:
    """A pair (i, j), i != j, and l with -a_i / a_j = l^2; the last pair is preferred."""
    coeffs = form.require_diagonal()
    f, d = form.field, form.d
    pairs = [(d - 2, d - 1)] + [(i, j) for i in range(d) for j in range(d) if i != j]
    for i, j in pairs:
        ratio = int(f.neg[f.mul[coeffs[i], f.inverse(coeffs[j])]])
        l = int(f.sqrt[ratio])
        if l >= 0:
            return i, j, l
    return None


def witness_Omega(form: QuadraticForm) -> tuple[Variety, WitnessSet]:
    """Transformed surface S' and the set Omega in F_q^(d-1) x D.

    With -a_i / a_j = l^2 the substitution ``y = L x`` (the other coordinates
    first, then ``a_j (l x_i + x_j)`` and ``l x_i - x_j``) turns S into
    ``S' = {b_1 y_1^2 + ... + b_{d-2} y_{d-2}^2 - y_{d-1} y_d = 0}``.  Omega
    is the graph ``m_{d-1} = (sum m_k^2 / b_k) / (4 m_d)`` over ``m_d`` in the
    nonzero squares D.  ``L`` is stored on the returned WitnessSet.
    """
    coeffs = form.require_diagonal()
    f, d, q = form.field, form.d, form.field.q
    if d < 3:
        raise ValidationError("the Omega witness needs d >= 3")
    found = find_square_ratio(form)
    if found is None:
        raise NoSquareRatio(f"no pair with -a_i/a_j a square for {coeffs}")
    i, j, l = found
    rest = [k for k in range(d) if k not in (i, j)]
    b = [coeffs[k] for k in rest]

    L = np.zeros((d, d), dtype=np.int64)
    for row, k in enumerate(rest):
        L[row, k] = 1
    L[d - 2, i] = f.mul[coeffs[j], l]
    L[d - 2, j] = coeffs[j]
    L[d - 1, i] = l
    L[d - 1, j] = f.neg[1]

    half = int(f.neg[f.inverse(f.from_int(2))])
    G = np.zeros((d, d), dtype=np.int64)
    for row, bk in enumerate(b):
        G[row, row] = bk
    G[d - 2, d - 1] = G[d - 1, d - 2] = half
    transformed = enumerate_variety(
        QuadraticForm(f, gram=[[FieldElement(f, int(v)) for v in r] for r in G])
    )

    free = decode(np.arange(q ** (d - 2)), q, d - 2) if d > 2 else np.zeros((1, 0), np.int64)
    D = f.squares
    num = np.zeros(free.shape[0], dtype=np.int64)
    for k, bk in enumerate(b):
        num = f.add[num, f.mul[int(f.inv[bk]), f.mul[free[:, k], free[:, k]]]]
    pts = np.zeros((free.shape[0] * D.size, d), dtype=np.int64)
    pts[:, : d - 2] = np.repeat(free, D.size, axis=0)
    md = np.tile(D, free.shape[0])
    four = f.from_int(4)
    pts[:, d - 1] = md
    pts[:, d - 2] = f.mul[np.repeat(num, D.size), f.inv[f.mul[four, md]]]
    idx = np.sort(encode(pts, q))
    L.setflags(write=False)
    return transformed, WitnessSet("Omega", f, d, idx, transform=L)


def omega_pullback(omega: WitnessSet) -> WitnessSet:
    """Omega carried back to the original coordinates: {L^T m'}."""
    f = omega.field
    pts = mat_apply(f, omega.transform.T, omega.points)
    return WitnessSet("Omega", f, omega.d, np.sort(encode(pts, f.q)))


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    field: FiniteField
    offset: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.basis and rank(self.field, self.basis) != len(self.basis):
            raise ValidationError("basis vectors are dependent")

    @property
    def k(self) -> int:
        return len(self.basis)

    @property
    def d(self) -> int:
        return len(self.offset)

    def points(self) -> np.ndarray:
        f, q = self.field, self.field.q
        coeffs = decode(np.arange(q**self.k), q, self.k) if self.k else np.zeros((1, 0), np.int64)
        pts = np.tile(np.asarray(self.offset, dtype=np.int64), (coeffs.shape[0], 1))
        for t, b in enumerate(self.basis):
            for j, bj in enumerate(b):
                if bj:
                    pts[:, j] = f.add[pts[:, j], f.mul[bj, coeffs[:, t]]]
        return pts

    def indices(self) -> np.ndarray:
        return np.sort(encode(self.points(), self.field.q))

    def to_json(self) -> dict:
        return {"k": self.k, "offset": list(self.offset), "basis": [list(b) for b in self.basis]}


def verify_subspace(h: AffineSubspace, v: Variety) -> bool:
    if h.field != v.field or h.d != v.d:
        raise ValidationError("subspace and variety live on different grids")
    return bool(v.indicator()[h.indices()].all())


def _pair_vector(form: QuadraticForm, i: int, j: int) -> tuple[int, ...] | None:
    f, a = form.field, form.coeffs
    l = int(f.sqrt[f.neg[f.mul[a[i], f.inverse(a[j])]]])
    if l < 0:
        return None
    v = [0] * form.d
    v[i], v[j] = 1, l
    return tuple(v)


def _greedy_pairs(form: QuadraticForm, count: int) -> list[tuple[int, ...]]:
    used: set[int] = set()
    out = []
    for i in range(form.d):
        if i in used or len(out) == count:
            continue
        for j in range(i + 1, form.d):
            if j in used:
                continue
            v = _pair_vector(form, i, j)
            if v is not None:
                out.append(v)
                used.update((i, j))
                break
    return out


SUBSPACE_KINDS = ("alternating-odd", "alternating-even", "cone-odd", "cone-even", "line")


def explicit_subspace(form: QuadraticForm, kind: str) -> AffineSubspace:
    """Explicit isotropic subspaces built from coordinate pairs.

    Each basis vector is ``e_i + l e_j`` with ``l^2 = -a_i / a_j``; disjoint
    pairs are orthogonal, so their span lies in S.  ``alternating-*`` pairs
    consecutive coordinates (l = 1 for the +-1 pattern), ``cone-*`` needs
    ``i^2 = -1`` in F_q and pairs coordinates greedily, ``line`` uses the
    first admissible pair.
    """
    form.require_diagonal()
    f, d = form.field, form.d
    if kind not in SUBSPACE_KINDS:
        raise ValidationError(f"unknown subspace kind {kind!r}")
    if kind.endswith("odd") and d % 2 == 0 or kind.endswith("even") and d % 2 == 1:
        raise ConstructionInapplicable(f"{kind} needs {'odd' if kind.endswith('odd') else 'even'} d")
    k = d // 2
    if kind.startswith("alternating"):
        basis = [_pair_vector(form, 2 * t, 2 * t + 1) for t in range(k)]
        if any(b is None for b in basis):
            raise ConstructionInapplicable(f"coefficients {form.coeffs} do not pair up consecutively")
    elif kind.startswith("cone"):
        if f.eta[f.neg[1]] != 1:
            raise ConstructionInapplicable(f"-1 is not a square in F_{f.q}")
        basis = _greedy_pairs(form, k)
        if len(basis) < k:
            raise ConstructionInapplicable(f"could not pair {k} coordinate couples")
    else:
        basis = _greedy_pairs(form, 1)
        if not basis:
            raise ConstructionInapplicable("no pair with -a_i/a_j a square")
    h = AffineSubspace(f, (0,) * d, tuple(basis))
    if not np.all(form.evaluate(h.points()) == 0):
        raise ConstructionInapplicable("constructed subspace is not contained in S")
    return h


def find_isotropic_subspace(form: QuadraticForm, guard: int = DEFAULT_GUARD) -> AffineSubspace:
    """A linear subspace of maximal dimension inside S, by depth-first search.

    Candidates are normalized isotropic vectors (first nonzero coordinate 1)
    taken in increasing index order; each level keeps only candidates that are
    polar-orthogonal to everything chosen and independent of it.
    """
    f, q, d = form.field, form.field.q, form.d
    check_grid(q, d, guard)
    iso = np.nonzero(form.grid_values() == 0)[0]
    iso = iso[iso != 0]
    pts = decode(iso, q, d)
    first = pts[np.arange(len(pts)), np.argmax(pts != 0, axis=1)] if len(pts) else np.zeros(0)
    cands = pts[first == 1]
    bound = d // 2
    best: list[np.ndarray] = []

    def search(chosen, echelon, pool) -> bool:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(best) == bound:
            return True
        for n, v in enumerate(pool):
            if len(chosen) + 1 + (len(pool) - n - 1) <= len(best):
                break
            ech = _extend_echelon(f, echelon, v)
            rest = pool[n + 1 :]
            if rest.size:
                w = mat_apply(f, form.gram, v[None, :])[0]
                rest = rest[dot(f, rest, w) == 0]
                if rest.size:
                    rest = rest[np.any(_reduce(f, rest, ech) != 0, axis=1)]
            if search(chosen + [v], ech, rest):
                return True
        return False

    search([], [], cands)
    basis = tuple(tuple(int(x) for x in v) for v in best)
    return AffineSubspace(f, (0,) * d, basis)


def max_isotropic_dimension(form: QuadraticForm, guard: int = DEFAULT_GUARD) -> int:
    """Witt index: the largest k with a k-dimensional linear subspace inside S."""
    return find_isotropic_subspace(form, guard).k
