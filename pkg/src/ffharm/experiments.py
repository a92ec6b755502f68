"""Sweeps over q, log-log exponent fits and (1/p, 1/r) exponent regions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from xml.sax.saxutils import escape

import numpy as np

from .errors import BadDimension, BadScheme, BadSubspaceDim, NonPositiveValue, TooFewPoints, ValidationError
from .field import field_of_order
from .norms import OperatorSpec, exact_norm_2_2, norm_estimate_ascent, witness_battery
from .variety import QuadraticForm, cone_form, diagonalize, enumerate_variety

SCHEMES = ("ones", "alternating", "cone", "explicit")


def scheme_form(scheme: str, d: int, q: int, coeffs=None) -> QuadraticForm:
    """Diagonal form for a named coefficient rule over F_q."""
    field = field_of_order(q)
    if scheme == "ones":
        diag = [1] * d
    elif scheme == "alternating":
        diag = [int(field.neg[1]) if j % 2 else 1 for j in range(d)]
    elif scheme == "cone":
        if d < 3:
            raise BadScheme("the cone scheme needs d >= 3")
        diag = list(diagonalize(cone_form(d, field))[0])
    elif scheme == "explicit":
        if coeffs is None or len(coeffs) != d:
            raise BadScheme(f"explicit scheme needs {d} coefficients")
        return QuadraticForm(field, diag=list(coeffs))
    else:
        raise BadScheme(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return QuadraticForm.from_encodings(field, diag)


def derived_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1)[0])


# ---------------------------------------------------------------------------


@dataclass
class SweepRow:
    q: int
    cardinality: int
    value: float
    method: str
    label: str
    converged: bool
    witnesses: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "q": self.q, "cardinality": self.cardinality, "value": self.value, "method": self.method,
            "label": self.label, "converged": self.converged, "witnesses": self.witnesses,
        }


@dataclass
class SweepResult:
    rows: list
    spec: dict

    @property
    def qs(self) -> np.ndarray:
        return np.array([r.q for r in self.rows], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows], dtype=float)

    def to_json(self) -> dict:
        return {"spec": self.spec, "rows": [r.to_json() for r in self.rows]}


def run_sweep(
    q_list,
    d: int,
    scheme: str,
    kind: str,
    p: float,
    r: float,
    method: str = "ascent",
    seed: int = 0,
    coeffs=None,
    witness: str | None = None,
    restarts: int = 16,
    max_iter: int = 500,
    tol: float = 1e-8,
    workers: int = 1,
) -> SweepResult:
    """One norm measurement per q, all with the same method.

    ``method`` is ``ascent``, ``exact`` (p = r = 2) or ``witness``; with
    ``witness`` set, the named battery entry is used, otherwise the best one.
    """
    qs = sorted(set(int(q) for q in q_list))
    if method not in ("ascent", "exact", "witness"):
        raise ValidationError(f"unknown sweep method {method!r}")
    rows = []
    for q in qs:
        form = scheme_form(scheme, d, q, coeffs)
        v = enumerate_variety(form)
        spec = OperatorSpec(kind, v, p, r)
        battery = witness_battery(spec)
        seen = {e.label: e.value for e in battery}
        if method == "exact":
            est = exact_norm_2_2(spec)
        elif method == "ascent":
            est = norm_estimate_ascent(spec, restarts, max_iter, tol, derived_seed(seed, q), workers=workers)
        elif witness is not None:
            match = [e for e in battery if e.label == witness or e.label.startswith(witness + "[")]
            if not match:
                raise ValidationError(f"witness {witness!r} does not apply at q={q}")
            est = match[0]
        else:
            est = max(battery, key=lambda e: e.value)
        rows.append(SweepRow(q, v.cardinality, float(est.value), est.method, est.label, bool(est.converged), seen))
    echo = {
        "d": d, "scheme": scheme, "coeffs": None if coeffs is None else [str(c) for c in coeffs],
        "kind": kind, "p": _num(p), "r": _num(r), "method": method, "witness": witness, "seed": seed,
    }
    return SweepResult(rows, echo)


def _num(x):
    return "inf" if x == math.inf else float(x)


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    residuals: list
    r2: float

    @property
    def max_residual(self) -> float:
        return float(max(abs(x) for x in self.residuals))

    def to_json(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r2,
                "max_residual": self.max_residual, "residuals": self.residuals}


def fit_exponent(sweep, values=None) -> ExponentFit:
    """Least-squares slope of log(value) against log(q).

    Accepts a :class:`SweepResult` or two sequences ``(qs, values)``.
    """
    if values is None:
        qs, vals = sweep.qs, sweep.values
    else:
        qs, vals = np.asarray(sweep, dtype=float), np.asarray(values, dtype=float)
    if qs.size < 3:
        raise TooFewPoints(f"need at least 3 rows, got {qs.size}")
    if np.any(vals <= 0) or np.any(qs <= 0):
        raise NonPositiveValue("log-log fit needs positive values")
    x, y = np.log(qs), np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    res = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(res**2)) / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(float(slope), float(intercept), [float(t) for t in res], r2)


# ---------------------------------------------------------------------------
# regions in the (1/p, 1/r) square, exact arithmetic


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x).limit_denominator(10**9)


@dataclass(frozen=True)
class HalfPlane:
    """a * x + b * y <= c."""

    a: Fraction
    b: Fraction
    c: Fraction
    name: str = ""

    def value(self, x: Fraction, y: Fraction) -> Fraction:
        return self.a * x + self.b * y - self.c


UNIT_SQUARE = (
    HalfPlane(Fraction(-1), Fraction(0), Fraction(0), "1/p >= 0"),
    HalfPlane(Fraction(1), Fraction(0), Fraction(1), "1/p <= 1"),
    HalfPlane(Fraction(0), Fraction(-1), Fraction(0), "1/r >= 0"),
    HalfPlane(Fraction(0), Fraction(1), Fraction(1), "1/r <= 1"),
)


def _clip(poly: list, h: HalfPlane) -> list:
    out = []
    n = len(poly)
    for i in range(n):
        P, Q = poly[i], poly[(i + 1) % n]
        fp, fq = h.value(*P), h.value(*Q)
        if fp <= 0:
            out.append(P)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append((P[0] + t * (Q[0] - P[0]), P[1] + t * (Q[1] - P[1])))
    dedup = []
    for pt in out:
        if not dedup or dedup[-1] != pt:
            dedup.append(pt)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _hull(points) -> list:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for pt in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    for pt in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class ExponentRegion:
    """Convex polygon of admissible (1/p, 1/r), kept as half-planes and vertices."""

    name: str
    halfplanes: tuple
    vertices: tuple

    @classmethod
    def from_halfplanes(cls, name: str, planes) -> "ExponentRegion":
        planes = tuple(UNIT_SQUARE) + tuple(planes)
        poly = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))]
        for h in planes:
            poly = _clip(poly, h)
        return cls(name, planes, tuple(_hull(poly)))

    @classmethod
    def from_vertices(cls, name: str, points) -> "ExponentRegion":
        hull = _hull([(_frac(x), _frac(y)) for x, y in points])
        planes = []
        n = len(hull)
        for i in range(n):
            (x0, y0), (x1, y1) = hull[i], hull[(i + 1) % n]
            # counter-clockwise hull: interior lies to the left of each edge
            a, b = y1 - y0, x0 - x1
            planes.append(HalfPlane(a, b, a * x0 + b * y0, f"edge {i}"))
        return cls(name, tuple(planes), tuple(hull))

    def contains(self, inv_p, inv_r, strict: bool = False) -> bool:
        x, y = _frac(inv_p), _frac(inv_r)
        if strict:
            return all(h.value(x, y) < 0 for h in self.halfplanes if h.a or h.b)
        return all(h.value(x, y) <= 0 for h in self.halfplanes)

    def violated(self, inv_p, inv_r) -> list:
        x, y = _frac(inv_p), _frac(inv_r)
        return [h.name for h in self.halfplanes if h.value(x, y) > 0]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "vertices": [[str(x), str(y)] for x, y in self.vertices],
            "constraints": [{"a": str(h.a), "b": str(h.b), "c": str(h.c), "name": h.name} for h in self.halfplanes],
        }


def region_necessary_extension(d: int, k: int | None = None, square_ratio: bool = False) -> ExponentRegion:
    """Constraints on (1/p, 1/r) that any bounded extension estimate must satisfy.

    With x = 1/p, y = 1/r: y <= (d-1)/(2d); y <= (d-1)/d (1-x); with a
    k-dimensional subspace, y <= (d-1-k)/(d-k) (1-x); for even d (or odd d
    with a square ratio -a_i/a_j) y <= (d-2)/(2d-2).
    """
    if d < 2:
        raise BadDimension(f"d must be >= 2, got {d}")
    F = Fraction
    planes = [
        HalfPlane(F(0), F(1), F(d - 1, 2 * d), "r >= 2d/(d-1)"),
        HalfPlane(F(d - 1, d), F(1), F(d - 1, d), "r >= dp/((d-1)(p-1))"),
    ]
    if k is not None:
        if not 0 <= k < d - 1:
            raise BadSubspaceDim(f"subspace dimension must satisfy 0 <= k < d-1, got {k}")
        s = F(d - 1 - k, d - k)
        planes.append(HalfPlane(s, F(1), s, f"r >= p(d-k)/((p-1)(d-1-k)), k={k}"))
    if d % 2 == 0 or (d >= 3 and square_ratio):
        planes.append(HalfPlane(F(0), F(1), F(d - 2, 2 * d - 2), "r >= (2d-2)/(d-2)"))
    return ExponentRegion.from_halfplanes(f"extension-necessary(d={d}, k={k})", planes)


def region_necessary_averaging(d: int, k: int | None = None) -> ExponentRegion:
    """Hull of (0,0), (0,1), (1,1), (d/(d+1), 1/(d+1)); a large subspace cuts the corner."""
    if d < 2:
        raise BadDimension(f"d must be >= 2, got {d}")
    F = Fraction
    planes = [
        HalfPlane(F(1), F(-d), F(0), "x <= d y"),
        HalfPlane(F(d), F(-1), F(d - 1), "d x - y <= d - 1"),
    ]
    if k is not None:
        if not (2 * k > d - 1 and k <= d - 1):
            raise BadSubspaceDim(f"the subspace condition needs (d-1)/2 < k <= d-1, got k={k}")
        planes.append(HalfPlane(F(1), F(-1), F(d - 1 - k, d - k), f"y >= x - (d-1-k)/(d-k), k={k}"))
    return ExponentRegion.from_halfplanes(f"averaging-necessary(d={d}, k={k})", planes)


def averaging_subspace_vertices(d: int, k: int) -> tuple:
    """The two corner points produced by a k-dimensional subspace."""
    F = Fraction
    den = (d - 1) * (d - k)
    return ((F(d * d - (k + 2) * d + 2 * k + 1, den), F(k, den)), (F(d * (d - 1 - k), den), F(d - 1 - k, den)))


def region_sufficient_averaging(d: int) -> ExponentRegion:
    """Odd d: the hull with corner (d/(d+1), 1/(d+1)); even d: the hull through P1 and P2."""
    if d < 2:
        raise BadDimension(f"d must be >= 2, got {d}")
    F = Fraction
    base = [(F(0), F(0)), (F(0), F(1)), (F(1), F(1))]
    if d % 2:
        return ExponentRegion.from_vertices(f"averaging-sufficient(d={d})", base + [(F(d, d + 1), F(1, d + 1))])
    p1 = (F(d * d - 2 * d + 2, d * (d - 1)), F(1, d - 1))
    p2 = (F(d - 2, d - 1), F(d - 2, d * (d - 1)))
    return ExponentRegion.from_vertices(f"averaging-sufficient(d={d})", base + [p1, p2])


def witness_slopes(kind: str, d: int, scheme: str, q_list, p: float, r: float, coeffs=None) -> dict:
    """Fitted growth exponent of every witness ratio that applies at all q."""
    series: dict = {}
    qs = sorted(set(int(q) for q in q_list))
    for q in qs:
        v = enumerate_variety(scheme_form(scheme, d, q, coeffs))
        for e in witness_battery(OperatorSpec(kind, v, p, r)):
            series.setdefault(e.label.split("[")[0], {})[q] = e.value
    out = {}
    for label, by_q in series.items():
        if len(by_q) == len(qs) and len(qs) >= 3:
            out[label] = fit_exponent(list(by_q), list(by_q.values())).slope
    return out


# ---------------------------------------------------------------------------


def svg_loglog(sweep: SweepResult, title: str = "", width: int = 480, height: int = 320) -> str:
    """A small standalone SVG of log(value) against log(q)."""
    x, y = np.log(sweep.qs), np.log(sweep.values)
    pad = 40
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x1 = x0 + 1
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(t):
        return pad + (t - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(t):
        return height - pad - (t - y0) / (y1 - y0) * (height - 2 * pad)

    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
    dots = "".join(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3"/>' for a, b in zip(x, y))
    labels = "".join(
        f'<text x="{sx(a):.2f}" y="{height - pad + 16}" font-size="10" text-anchor="middle">{int(q)}</text>'
        for a, q in zip(x, sweep.qs)
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<text x="{width / 2}" y="16" font-size="12" text-anchor="middle">{escape(title)}</text>'
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#999"/>'
        f'<polyline points="{pts}" fill="none" stroke="#1f77b4"/>{dots}{labels}'
        f'<text x="12" y="{height / 2}" font-size="10" transform="rotate(-90 12 {height / 2})">log value</text>'
        "</svg>\n"
    )


__all__ = [
    "SCHEMES", "scheme_form", "derived_seed", "SweepRow", "SweepResult", "run_sweep", "ExponentFit",
    "fit_exponent", "HalfPlane", "ExponentRegion", "region_necessary_extension",
    "region_necessary_averaging", "region_sufficient_averaging", "averaging_subspace_vertices",
    "witness_slopes", "svg_loglog",
]
