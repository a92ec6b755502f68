"""Lower bounds for extension, restriction and averaging operator norms.

Every estimate is the ratio ``|T w|_r / |w|_p`` of an explicit input ``w``,
so it never exceeds the true norm and can be re-checked with :func:`recheck`.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    ConstructionInapplicable,
    GridTooLarge,
    NonConvergence,
    NoSquareRatio,
    NotL2,
    ValidationError,
    ZeroWitness,
)
from .fourier import character_sum, sigma_inv
from .grid import DUAL, PRIMAL, GridFunction, check_exponent, weighted_norm
from .operators import SurfaceFunction
from .variety import (
    Variety,
    enumerate_variety,
    find_isotropic_subspace,
    omega_pullback,
    witness_M,
    witness_Omega,
)

KINDS = ("extension", "restriction", "averaging")
MONOTONE_SLACK = 1e-9


def conjugate_exponent(p: float) -> float:
    p = check_exponent(p)
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1)


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """T together with its source L^p and target L^r spaces.

    extension: L^p(S, d sigma) -> L^r(dm); restriction: L^p(dm) -> L^r(S, d sigma);
    averaging: L^p(dx) -> L^r(dx).  Inputs and outputs are flat arrays.
    """

    kind: str
    variety: Variety
    p: float
    r: float
    _multiplier: list = dc_field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "p", check_exponent(self.p))
        object.__setattr__(self, "r", check_exponent(self.r))

    @property
    def grid_size(self) -> int:
        return self.variety.q**self.variety.d

    @property
    def source_weight(self) -> float:
        v = self.variety
        return {"extension": 1 / v.cardinality, "restriction": 1.0, "averaging": v.q**-v.d}[self.kind]

    @property
    def target_weight(self) -> float:
        v = self.variety
        return {"extension": 1.0, "restriction": 1 / v.cardinality, "averaging": v.q**-v.d}[self.kind]

    @property
    def source_size(self) -> int:
        return self.variety.cardinality if self.kind == "extension" else self.grid_size

    @property
    def target_size(self) -> int:
        return self.variety.cardinality if self.kind == "restriction" else self.grid_size

    def multiplier(self) -> np.ndarray:
        if not self._multiplier:
            self._multiplier.append(sigma_inv(self.variety).values.real.copy())
        return self._multiplier[0]

    def _ext(self, f: np.ndarray) -> np.ndarray:
        v = self.variety
        full = np.zeros(self.grid_size, dtype=np.complex128)
        full[v.indices] = f
        return character_sum(full, v.field, v.d, +1) / v.cardinality

    def _res(self, g: np.ndarray) -> np.ndarray:
        v = self.variety
        return character_sum(g, v.field, v.d, -1)[v.indices]

    def _avg(self, f: np.ndarray) -> np.ndarray:
        v = self.variety
        hat = character_sum(f, v.field, v.d, -1) * v.q**-v.d
        return character_sum(hat * self.multiplier(), v.field, v.d, +1)

    def apply(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128).reshape(-1)
        if w.size != self.source_size:
            raise ValidationError(f"{self.kind} input needs {self.source_size} values, got {w.size}")
        return {"extension": self._ext, "restriction": self._res, "averaging": self._avg}[self.kind](w)

    def adjoint(self, g) -> np.ndarray:
        """T* for the measures attached to source and target."""
        g = np.asarray(g, dtype=np.complex128).reshape(-1)
        return {"extension": self._res, "restriction": self._ext, "averaging": self._avg}[self.kind](g)

    def source_norm(self, w) -> float:
        return weighted_norm(np.asarray(w), self.p, self.source_weight)

    def target_norm(self, h) -> float:
        return weighted_norm(np.asarray(h), self.r, self.target_weight)

    def ratio(self, w) -> float:
        den = self.source_norm(w)
        if den == 0:
            raise ZeroWitness("witness has zero norm")
        return self.target_norm(self.apply(w)) / den

    def dual(self) -> "OperatorSpec":
        """The adjoint operator between the conjugate spaces; it has the same norm."""
        kind = {"extension": "restriction", "restriction": "extension", "averaging": "averaging"}[self.kind]
        return OperatorSpec(kind, self.variety, conjugate_exponent(self.r), conjugate_exponent(self.p))

    def to_json(self) -> dict:
        return {"kind": self.kind, "variety": self.variety.to_json(), "p": _jnum(self.p), "r": _jnum(self.r)}


def _jnum(x: float):
    return "inf" if x == math.inf else x


def _digest(w: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(w, dtype=np.complex128).tobytes()).hexdigest()[:16]


@dataclass(eq=False)
class NormEstimate:
    """A certified lower bound: ``value`` is the ratio achieved by ``witness``.

    ``on_dual`` marks witnesses fed to the adjoint operator between the
    conjugate spaces, which has the same norm.
    """

    value: float
    method: str
    label: str = ""
    iterations: int = 0
    converged: bool = True
    witness: np.ndarray | None = dc_field(default=None, repr=False)
    on_dual: bool = False
    details: dict = dc_field(default_factory=dict)

    @property
    def digest(self) -> str:
        return "" if self.witness is None else _digest(self.witness)

    def to_json(self) -> dict:
        return {
            "value": self.value, "method": self.method, "label": self.label,
            "iterations": self.iterations, "converged": self.converged,
            "on_dual": self.on_dual, "witness_digest": self.digest, "details": self.details,
        }


def _values(w) -> np.ndarray:
    if isinstance(w, (GridFunction, SurfaceFunction)):
        return w.values
    return np.asarray(w, dtype=np.complex128).reshape(-1)


def _check_side(spec: OperatorSpec, w) -> None:
    want = {"extension": None, "restriction": DUAL, "averaging": PRIMAL}[spec.kind]
    if isinstance(w, GridFunction) and (want is None or w.side != want):
        raise ValidationError(f"{spec.kind} input has the wrong side: {w.side}")
    if isinstance(w, SurfaceFunction) and spec.kind != "extension":
        raise ValidationError(f"{spec.kind} does not take a surface function")


def norm_lower_witness(spec: OperatorSpec, w, label: str = "", on_dual: bool = False) -> NormEstimate:
    """|T w|_r / |w|_p for one explicit input (of the adjoint when ``on_dual``)."""
    target = spec.dual() if on_dual else spec
    _check_side(target, w)
    vals = _values(w)
    return NormEstimate(target.ratio(vals), "witness", label, witness=vals.copy(), on_dual=on_dual)


def recheck(spec: OperatorSpec, est: NormEstimate) -> float:
    """Recompute the stored ratio from the stored witness."""
    target = spec.dual() if est.on_dual else spec
    return target.ratio(est.witness)


# ---------------------------------------------------------------------------


def _mean_zero(spec: OperatorSpec, x: np.ndarray) -> np.ndarray:
    return x - np.average(x)


def exact_norm_2_2(spec: OperatorSpec, mean_zero: bool = False, tol: float = 1e-10, max_iter: int = 10_000) -> NormEstimate:
    """Largest singular value of T on L^2 by power iteration on T*T.

    ``mean_zero`` restricts the source to functions with zero mean.  The
    Rayleigh quotients of a positive operator never decrease along the
    iteration; a drop beyond rounding raises :class:`NonConvergence`.
    """
    if spec.p != 2 or spec.r != 2:
        raise NotL2(f"exact_norm_2_2 needs p = r = 2, got ({spec.p}, {spec.r})")
    rng = np.random.default_rng(0)
    x = 1.0 + rng.uniform(-0.5, 0.5, spec.source_size) + 0j
    ws = spec.source_weight

    def proj(y):
        return _mean_zero(spec, y) if mean_zero else y

    def unit(y):
        n = math.sqrt(ws * float(np.vdot(y, y).real))
        if n == 0:
            raise ZeroWitness("power iteration collapsed to zero")
        return y / n

    x = unit(proj(x))
    last, it = -math.inf, 0
    for it in range(1, max_iter + 1):
        y = proj(spec.adjoint(spec.apply(x)))
        rayleigh = ws * float(np.vdot(x, y).real)
        if rayleigh < last - 1e-12 * max(1.0, abs(last)):
            raise NonConvergence(f"Rayleigh quotient dropped from {last} to {rayleigh}")
        x = unit(y)
        if abs(rayleigh - last) <= tol * max(rayleigh, 1e-300):
            last = rayleigh
            break
        last = rayleigh
    else:
        value = spec.ratio(x)
        return NormEstimate(value, "power-2-2", "power", it, False, x, details={"mean_zero": mean_zero})
    return NormEstimate(spec.ratio(x), "power-2-2", "power", it, True, x, details={"mean_zero": mean_zero})


# ---------------------------------------------------------------------------


def _phi(z: np.ndarray, s: float) -> np.ndarray:
    """|z|^(s-1) * phase(z)."""
    a = np.abs(z)
    out = np.zeros_like(z)
    nz = a > 0
    out[nz] = z[nz] * a[nz] ** (s - 2)
    return out


def _ascend(spec: OperatorSpec, x: np.ndarray, max_iter: int, tol: float):
    pc = conjugate_exponent(spec.p)
    scale = spec.source_norm(x)
    if scale == 0:
        raise ZeroWitness("ascent start has zero norm")
    x = x / scale
    best = spec.ratio(x)
    for it in range(1, max_iter + 1):
        y = spec.apply(x)
        ny = spec.target_norm(y)
        if ny == 0:
            return best, x, it, True
        g = _phi(y / ny, spec.r)
        new = _phi(spec.adjoint(g), pc)
        nn = spec.source_norm(new)
        if nn == 0:
            return best, x, it, True
        new = new / nn
        val = spec.ratio(new)
        if val < best * (1 - MONOTONE_SLACK):
            raise NonConvergence(f"ascent objective decreased from {best} to {val}")
        gain = val - best
        if val >= best:
            best, x = val, new
        if gain <= tol * best:
            return best, x, it, True
    return best, x, max_iter, False


def norm_estimate_ascent(
    spec: OperatorSpec,
    restarts: int = 16,
    max_iter: int = 500,
    tol: float = 1e-8,
    seed: int = 0,
    starts: list | None = None,
    workers: int = 1,
) -> NormEstimate:
    """Best ratio reached by the nonlinear power method over several starts.

    The starts are the given (or battery) witnesses followed by ``restarts``
    random unit-phase vectors drawn from per-restart seeds.  Endpoint
    exponents fall back to the witness battery plus point masses.
    """
    if not (1 < spec.p < math.inf and 1 < spec.r < math.inf):
        return _endpoint_estimate(spec)
    if starts is None:
        starts = [e.witness for e in witness_battery(spec) if not e.on_dual]
    children = np.random.SeedSequence(seed).spawn(restarts)
    inits = [np.asarray(s, dtype=np.complex128).reshape(-1) for s in starts]
    for child in children:
        rng = np.random.default_rng(child)
        inits.append(np.exp(2j * np.pi * rng.random(spec.source_size)))

    def run(x0):
        return _ascend(spec, x0, max_iter, tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, inits))
    else:
        results = [run(x0) for x0 in inits]
    # deterministic reduction: first index among ties
    k = int(np.argmax([r[0] for r in results]))
    value, x, iters, conv = results[k]
    certified = spec.ratio(x)
    return NormEstimate(
        certified, "ascent", "ascent", iters, conv, x,
        details={"start": k, "starts": len(inits), "seed": seed, "all_converged": all(r[3] for r in results)},
    )


def _endpoint_estimate(spec: OperatorSpec, cap: int = 4096) -> NormEstimate:
    cands = [e for e in witness_battery(spec) if not e.on_dual]
    n = spec.source_size
    for i in range(min(n, cap)):
        w = np.zeros(n, dtype=np.complex128)
        w[i] = 1.0
        cands.append(NormEstimate(spec.ratio(w), "witness", f"point[{i}]", witness=w))
    best = max(cands, key=lambda e: e.value)
    best.details = {**best.details, "heuristic": True, "candidates": len(cands)}
    return best


# ---------------------------------------------------------------------------


def _subspace(v: Variety):
    try:
        h = find_isotropic_subspace(v.form)
    except (GridTooLarge, ConstructionInapplicable):
        return None
    return h if h.k > 0 else None


def hat_M_on_surface(v: Variety) -> tuple[np.ndarray, float]:
    """|M^(x)| over x in S minus the origin, and q^((d-2)/2) (q-1)."""
    form = v.form
    g = witness_M(form).indicator()
    vals = np.abs(character_sum(g.values, v.field, v.d, -1)[v.indices[1:]])
    return vals, v.q ** ((v.d - 2) / 2) * (v.q - 1)


def hat_Omega_on_surface(v: Variety) -> tuple[np.ndarray, float]:
    """|Omega^(x)| over x in S' with x_(d-1) != 0, and q^((d-2)/2) (q-1) / 2."""
    transformed, omega = witness_Omega(v.form)
    pts = transformed.points
    sel = transformed.indices[pts[:, v.d - 2] != 0]
    hat = character_sum(omega.indicator().values, v.field, v.d, -1)
    return np.abs(hat[sel]), v.q ** ((v.d - 2) / 2) * (v.q - 1) / 2


def witness_battery(spec: OperatorSpec) -> list[NormEstimate]:
    """Ratios for the standard test inputs that apply to this operator."""
    v = spec.variety
    q, d, n = v.q, v.d, v.q**v.d
    out: list[NormEstimate] = []
    h = _subspace(v)

    if spec.kind == "averaging":
        delta = np.zeros(n)
        delta[0] = 1.0
        out.append(norm_lower_witness(spec, delta, "delta0"))
        out.append(norm_lower_witness(spec, np.ones(n), "constant"))
        if h is not None:
            ind = np.zeros(n)
            ind[h.indices()] = 1.0
            e = norm_lower_witness(spec, ind, f"subspace[k={h.k}]")
            conv = spec.apply(ind).real
            e.details = {"k": h.k, "floor_on_H": q**h.k / v.cardinality, "min_on_H": float(conv[h.indices()].min())}
            out.append(e)
        return out

    if spec.kind == "extension":
        src = spec
        out.append(norm_lower_witness(src, np.ones(v.cardinality), "constant"))
        point = np.zeros(v.cardinality)
        point[min(1, v.cardinality - 1)] = 1.0
        out.append(norm_lower_witness(src, point, "point"))
        if h is not None:
            on_h = np.isin(v.indices, h.indices()).astype(float)
            e = norm_lower_witness(src, on_h, f"subspace[k={h.k}]")
            e.details = {"k": h.k}
            out.append(e)
        dual_flag = True
    else:
        dual_flag = False
        delta = np.zeros(n)
        delta[0] = 1.0
        out.append(norm_lower_witness(spec, delta, "delta0"))

    # M and Omega live on the dual grid: restriction-side inputs
    if v.form.is_diagonal:
        m = witness_M(v.form)
        e = norm_lower_witness(spec, m.indicator(), "M", on_dual=dual_flag)
        if d % 2 == 0:
            vals, expect = hat_M_on_surface(v)
            e.details = {"expected_abs_hat": expect, "max_abs_error": float(np.abs(vals - expect).max()) if vals.size else 0.0}
        out.append(e)
        if d >= 3:
            try:
                _, omega = witness_Omega(v.form)
            except NoSquareRatio:
                omega = None
            if omega is not None:
                e = norm_lower_witness(spec, omega_pullback(omega).indicator(), "Omega", on_dual=dual_flag)
                vals, expect = hat_Omega_on_surface(v)
                e.details = {"expected_abs_hat": expect, "max_abs_error": float(np.abs(vals - expect).max())}
                out.append(e)
    return out


def best_lower_bound(spec: OperatorSpec, **ascent_kw) -> NormEstimate:
    """Max of the witness battery and, for interior exponents, the ascent."""
    cands = witness_battery(spec)
    if 1 < spec.p < math.inf and 1 < spec.r < math.inf:
        cands.append(norm_estimate_ascent(spec, **ascent_kw))
    return max(cands, key=lambda e: e.value)


__all__ = [
    "OperatorSpec", "NormEstimate", "conjugate_exponent", "norm_lower_witness", "recheck",
    "exact_norm_2_2", "norm_estimate_ascent", "witness_battery", "best_lower_bound",
    "hat_M_on_surface", "hat_Omega_on_surface", "KINDS",
]
