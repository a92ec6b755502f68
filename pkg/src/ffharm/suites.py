"""Named verification suites; each returns a :class:`SuiteReport` of pass/fail checks."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import __version__
from .errors import UnknownSuite
from .experiments import derived_seed, fit_exponent, run_sweep, scheme_form
from .field import field_of_order
from .fourier import (
    convolve,
    decay_max,
    predicted_decay,
    sigma_inv,
    sigma_inv_bruteforce,
    sigma_inv_closed_form,
)
from .grid import DUAL, PRIMAL, GridFunction
from .norms import (
    OperatorSpec,
    exact_norm_2_2,
    hat_M_on_surface,
    hat_Omega_on_surface,
    norm_estimate_ascent,
    norm_lower_witness,
)
from .operators import dyadic_cutoff, dyadic_decompose, k_hat, kernel_K, restriction_energy, average
from .variety import (
    QuadraticForm,
    cone_form,
    diagonalize,
    enumerate_variety,
    max_isotropic_dimension,
    explicit_subspace,
    variety_cardinality,
    verify_subspace,
)

BOUNDED_SLOPE = 0.15
BLOWUP_SLOPE = 0.1


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    bound: float | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "value": self.value, "bound": self.bound, "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    params: dict
    seed: int
    checks: list = dc_field(default_factory=list)
    constants: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def check(self, name: str, passed: bool, value=None, bound=None, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), _f(value), _f(bound), detail))
        return bool(passed)

    def to_json(self) -> dict:
        return {
            "command": "suite", "suite": self.suite, "params": self.params, "seed": self.seed,
            "version": __version__, "passed": self.passed,
            "checks": [c.to_json() for c in self.checks], "constants": self.constants,
        }

    def to_text(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"suite {self.suite}  seed={self.seed}  {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            val = "" if c.value is None else f"{c.value:.6g}"
            bnd = "" if c.bound is None else f"{c.bound:.6g}"
            lines.append(f"  {'ok  ' if c.passed else 'FAIL'} {c.name:<{width}}  {val:>12}  {bnd:>12}  {c.detail}")
        for k in sorted(self.constants):
            lines.append(f"  const {k} = {self.constants[k]}")
        return "\n".join(lines) + "\n"


def _f(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _random_form(rng, q: int, d: int) -> QuadraticForm:
    field = field_of_order(q)
    return QuadraticForm(field, diag=[field.element(int(c)) for c in rng.integers(1, q, size=d)])


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


# ---------------------------------------------------------------------------


def suite_explicit_formula(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("explicit-formula", params, seed)
    worst, bad_count = 0.0, 0
    for q in params["q"]:
        for d in params["d"]:
            rng = _rng(seed, q, d)
            for _ in range(params["trials"]):
                form = _random_form(rng, q, d)
                v = enumerate_variety(form)
                diff = float(np.abs(sigma_inv_bruteforce(v).values - sigma_inv_closed_form(form).values).max())
                worst = max(worst, diff)
                if v.cardinality != variety_cardinality(form):
                    bad_count += 1
    rep.check("max_abs_diff", worst <= 1e-9, worst, 1e-9, "brute-force vs closed form")
    rep.check("cardinality_mismatches", bad_count == 0, bad_count, 0)
    rep.constants["max_abs_diff"] = worst
    return rep


def suite_decay(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("decay", params, seed)
    worst = 0.0
    for q in params["q"]:
        for d in params["d"]:
            rng = _rng(seed, q, d)
            for _ in range(params["trials"]):
                form = _random_form(rng, q, d)
                v = enumerate_variety(form)
                got, want = decay_max(v), predicted_decay(form)
                worst = max(worst, abs(got - want) / want)
    rep.check("max_rel_error", worst <= 1e-9, worst, 1e-9, "max over m != 0 vs exact constant")
    f3 = field_of_order(3)
    got = decay_max(enumerate_variety(QuadraticForm(f3, diag=[1, 1, 1])))
    rep.check("q3_d3_ones", abs(got - 1 / 3) <= 1e-12, got, 1 / 3)
    rep.constants["max_rel_error"] = worst
    return rep


def suite_tomas_stein(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("tomas-stein", params, seed)
    c2 = cinf = ident = 0.0
    for q in params["q"]:
        for d in params["d"]:
            rng = _rng(seed, q, d)
            field = field_of_order(q)
            for _ in range(params["trials"]):
                v = enumerate_variety(_random_form(rng, q, d))
                K = kernel_K(v)
                n = q**d
                g = GridFunction(DUAL, field, d, rng.normal(size=n) + 1j * rng.normal(size=n))
                gk = convolve(g, K)
                c2 = max(c2, gk.norm(2) / (q**d / v.cardinality * g.norm(2)))
                cinf = max(cinf, gk.norm(math.inf) / (np.abs(K.values).max() * g.norm(1)))
                # |g^|^2 on S equals <g * (d sigma)^vee, g>
                lhs = OperatorSpec("restriction", v, 2, 2).target_norm(OperatorSpec("restriction", v, 2, 2).apply(g.values)) ** 2
                rhs = np.vdot(g.values, convolve(g, sigma_inv(v)).values).real
                ident = max(ident, abs(lhs - rhs) / max(abs(lhs), 1e-300))
    rep.check("l2_bound", c2 <= 1 + 1e-9, c2, 1.0, "|g*K|_2 / ((q^d/|S|) |g|_2)")
    rep.check("linf_bound", cinf <= 1 + 1e-9, cinf, 1.0, "|g*K|_inf / (max|K| |g|_1)")
    rep.check("orthogonality_identity", ident <= 1e-9, ident, 1e-9, "|g^|_{L2(S)}^2 = <g*(d sigma)^vee, g>")
    rep.constants.update({"l2_ratio": c2, "linf_ratio": cinf})
    for d in params["d"]:
        alpha = d - 1 if d % 2 else d - 2
        if alpha <= 0:
            continue
        r = 2 * (alpha + 2) / alpha
        vals = []
        for q in params["q"]:
            v = enumerate_variety(scheme_form("alternating", d, q))
            vals.append(norm_estimate_ascent(OperatorSpec("extension", v, 2, r), restarts=params.get("restarts", 4), seed=derived_seed(seed, q, d)).value)
        rep.constants[f"extension_2_to_{r:g}_d{d}"] = vals
    return rep


def suite_carbery(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("carbery", params, seed)
    c2 = cinf = 0.0
    for q in params["q"]:
        for d in params["d"]:
            rng = _rng(seed, q, d)
            field = field_of_order(q)
            for _ in range(params["trials"]):
                v = enumerate_variety(_random_form(rng, q, d))
                Kh, K = k_hat(v), kernel_K(v)
                f = GridFunction(PRIMAL, field, d, rng.normal(size=q**d) + 1j * rng.normal(size=q**d))
                fk = convolve(f, Kh)
                c2 = max(c2, fk.norm(2) / (np.abs(K.values).max() * f.norm(2)))
                cinf = max(cinf, fk.norm(math.inf) / (Kh.norm(math.inf) * f.norm(1)))
    rep.check("l2_bound", c2 <= 1 + 1e-9, c2, 1.0, "|f*K^|_2 / (|K|_inf |f|_2)")
    rep.check("linf_bound", cinf <= 1 + 1e-9, cinf, 1.0, "|f*K^|_inf / (|K^|_inf |f|_1)")
    rep.constants.update({"l2_ratio": c2, "linf_ratio": cinf})
    for d in params["d"]:
        if d % 2 == 0:
            continue
        alpha = d - 1
        p, r = (alpha + 2) / (alpha + 1), alpha + 2
        vals = []
        for q in params["q"]:
            v = enumerate_variety(scheme_form("alternating", d, q))
            vals.append(norm_estimate_ascent(OperatorSpec("averaging", v, p, r), restarts=params.get("restarts", 4), seed=derived_seed(seed, q, d)).value)
        rep.constants[f"averaging_{p:g}_to_{r:g}_d{d}"] = vals
    return rep


def _random_set(rng, q: int, d: int) -> np.ndarray:
    n = q**d
    size = int(round(math.exp(rng.uniform(0, math.log(n)))))
    ind = np.zeros(n)
    ind[rng.choice(n, size=max(1, min(n, size)), replace=False)] = 1.0
    return ind


def suite_restriction_ineq(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("restriction-ineq", params, seed)
    worst = 0.0
    for q in params["q"]:
        for d in params["d"]:
            rng = _rng(seed, q, d)
            field = field_of_order(q)
            for _ in range(params["trials"]):
                v = enumerate_variety(_random_form(rng, q, d))
                E = GridFunction(PRIMAL, field, d, _random_set(rng, q, d))
                size = float(E.values.real.sum())
                bound = min(q ** -(d + 1) * size ** ((d + 2) / d), q**-d * size)
                worst = max(worst, restriction_energy(E, v) / bound)
    limit = params.get("C", 10.0)
    rep.check("max_C", worst <= limit, worst, limit, "energy / min{q^-(d+1)|E|^((d+2)/d), q^-d |E|}")
    rep.constants["C"] = worst
    return rep


def suite_mainlemma(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("mainlemma", params, seed)
    cinf = c2 = 0.0
    for q in params["q"]:
        for d in params["d"]:
            if d % 2:
                continue
            rng = _rng(seed, q, d)
            field = field_of_order(q)
            v = enumerate_variety(scheme_form("alternating", d, q))
            Kh = k_hat(v)
            for _ in range(params["trials"]):
                E = GridFunction(PRIMAL, field, d, _random_set(rng, q, d))
                size = float(E.values.real.sum())
                ek = convolve(E, Kh)
                cinf = max(cinf, ek.norm(math.inf) / (size / q ** (d - 1)))
                two = q ** (-d + 0.5) * size ** ((d + 2) / (2 * d)) if size <= q ** (d / 2) else q ** (-d + 1) * size**0.5
                c2 = max(c2, ek.norm(2) / two)
    limit = params.get("C", 10.0)
    rep.check("linf_C", cinf <= limit, cinf, limit, "|E*K^|_inf / (|E| / q^(d-1))")
    rep.check("l2_C", c2 <= limit, c2, limit, "|E*K^|_2 / piecewise bound")
    rep.constants.update({"linf_C": cinf, "l2_C": c2})
    return rep


def suite_weaktype(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("weaktype", params, seed)
    ok_disjoint = ok_recon = ok_levels = ok_cut = ok_floor = ok_chain = True
    worst_chain = 0.0
    r = params.get("r", 4.0)
    for q, d in params["cases"]:
        rng = _rng(seed, q, d)
        field = field_of_order(q)
        v = enumerate_variety(scheme_form("alternating", d, q))
        for p in params["p"]:
            N = dyadic_cutoff(q, d, p)
            ok_cut &= 2.0 ** -(N + 1) <= q ** (-d / p)
            for _ in range(params["trials"]):
                raw = rng.random(q**d) ** rng.uniform(1, 12)
                raw[rng.random(q**d) < 0.1] = 0.0
                f = GridFunction(PRIMAL, field, d, raw / raw.max())
                dec = dyadic_decompose(f, N)
                cover = sum(s.values.real for s in dec.level_sets)
                ok_disjoint &= bool(cover.max() <= 1)
                ok_recon &= bool(np.array_equal(dec.reconstruct().values, f.values))
                fp = f.norm(p)
                for k, s in enumerate(dec.level_sets):
                    ok_levels &= fp >= 2.0 ** (-k - 1) * s.norm(p) * (1 - 1e-12)
                ok_floor &= fp >= 2.0 ** -(N + 1) * (1 - 1e-12)
                # triangle inequality over levels plus the tail
                lhs = average(f, v, "fft").norm(r)
                rhs = sum(2.0**-k * average(s, v, "fft").norm(r) for k, s in enumerate(dec.level_sets)) + 2.0 ** -(N + 1)
                worst_chain = max(worst_chain, lhs / rhs)
                ok_chain &= lhs <= rhs * (1 + 1e-9)
    rep.check("levels_disjoint", ok_disjoint)
    rep.check("reconstruction_exact", ok_recon)
    rep.check("level_lower_bounds", ok_levels, detail="|f|_p >= 2^(-k-1) |E_k|_p")
    rep.check("cutoff", ok_cut, detail="2^-(N+1) <= q^(-d/p)")
    rep.check("floor", ok_floor, detail="|f|_p >= 2^-(N+1)")
    rep.check("level_sum_bound", ok_chain, worst_chain, 1.0, "|f*dsigma|_r <= sum 2^-k |E_k*dsigma|_r + 2^-(N+1)")
    return rep


def _slope_check(rep: SuiteReport, name: str, qs, vals, upper=None, lower=None, detail: str = "") -> float:
    fit = fit_exponent(qs, vals)
    ok = (upper is None or fit.slope <= upper) and (lower is None or fit.slope >= lower)
    rep.check(name, ok, fit.slope, upper if upper is not None else lower, detail)
    rep.constants[name] = {"q": list(qs), "values": list(map(float, vals)), "slope": fit.slope, "r2": fit.r2}
    return fit.slope


def suite_extension_odd(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("extension-sharpness-odd", params, seed)
    d = params.get("d_odd", 3)
    qs = params["q"]
    r = (2 * d + 2) / (d - 1)
    sw = run_sweep(qs, d, "alternating", "extension", 2, r, "ascent", seed, restarts=params.get("restarts", 16))
    _slope_check(rep, f"ascent_2_to_{r:g}_bounded", qs, sw.values, upper=BOUNDED_SLOPE)
    rb = params.get("r_below", 2.5)
    sw = run_sweep(qs, d, "alternating", "extension", 2, rb, "witness", seed, witness="Omega")
    _slope_check(rep, f"omega_witness_2_to_{rb:g}_blowup", qs, sw.values, lower=BLOWUP_SLOPE)
    worst = 0.0
    for q in params.get("q_omega", [3, 5, 7, 9]):
        vals, want = hat_Omega_on_surface(enumerate_variety(scheme_form("alternating", d, q)))
        worst = max(worst, float(np.abs(vals - want).max()) / want)
    rep.check("omega_hat_magnitude", worst <= 1e-9, worst, 1e-9, "|Omega^| = q^((d-2)/2)(q-1)/2 where x_(d-1) != 0")
    q2 = params.get("q_d2", qs)
    sw = run_sweep(q2, 2, "alternating", "extension", 2, 4, "witness", seed, witness="M")
    s = _slope_check(rep, "m_witness_d2_2_to_4", q2, sw.values, lower=0.20)
    rep.check("m_witness_d2_exponent_band", abs(s - 0.25) <= 0.05, s, 0.25, "expected 1/4 +- 0.05")
    return rep


def suite_extension_even(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("extension-sharpness-even", params, seed)
    d = params.get("d_even", 4)
    qs = params["q"]
    r = 2 * d / (d - 2)
    sw = run_sweep(qs, d, "alternating", "extension", 2, r, "ascent", seed, restarts=params.get("restarts", 16))
    _slope_check(rep, f"ascent_2_to_{r:g}_bounded", qs, sw.values, upper=BOUNDED_SLOPE)
    worst = 0.0
    for q in params.get("q_m", [3, 5, 7]):
        for dd in (2, d):
            vals, want = hat_M_on_surface(enumerate_variety(scheme_form("alternating", dd, q)))
            worst = max(worst, float(np.abs(vals - want).max()) / want)
    rep.check("m_hat_magnitude", worst <= 1e-9, worst, 1e-9, "|M^| = q^((d-2)/2)(q-1) on S minus 0")
    rb = params.get("r_below", 2.5)
    for label in ("M", "Omega"):
        sw = run_sweep(qs, d, "alternating", "extension", 2, rb, "witness", seed, witness=label)
        _slope_check(rep, f"{label.lower()}_witness_2_to_{rb:g}_blowup", qs, sw.values, lower=BLOWUP_SLOPE)
    return rep


def suite_averaging(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("averaging-sharpness", params, seed)
    worst22 = worst_mz = 0.0
    for q in params["q_exact"]:
        for d in (2, 3, 4):
            if q**d > 20000:
                continue
            for scheme in ("ones", "alternating"):
                v = enumerate_variety(scheme_form(scheme, d, q))
                spec = OperatorSpec("averaging", v, 2, 2)
                worst22 = max(worst22, abs(exact_norm_2_2(spec).value - 1))
                if d % 2:
                    mz = exact_norm_2_2(spec, mean_zero=True).value
                    worst_mz = max(worst_mz, abs(mz - q ** (-(d - 1) / 2)) / q ** (-(d - 1) / 2))
    rep.check("exact_2_2_is_one", worst22 <= 1e-9, worst22, 1e-9)
    rep.check("mean_zero_2_2_decay", worst_mz <= 1e-8, worst_mz, 1e-8, "odd d: q^(-(d-1)/2)")
    restarts = params.get("restarts", 16)
    qs = params["q"]
    sw = run_sweep(qs, 3, "alternating", "averaging", 4 / 3, 4, "ascent", seed, restarts=restarts)
    _slope_check(rep, "corner_d3_bounded", qs, sw.values, upper=BOUNDED_SLOPE)
    for d in (2, 4):
        qd = params["q_even"] if d == 4 else qs
        sw = run_sweep(qd, d, "alternating", "averaging", d / (d - 1), d, "ascent", seed, restarts=restarts)
        _slope_check(rep, f"midpoint_d{d}_bounded", qd, sw.values, upper=BOUNDED_SLOPE)
    worst = 0.0
    for q in params["q_small"]:
        for d in (2, 3):
            v = enumerate_variety(scheme_form("alternating", d, q))
            for p, r in params["r_le_p"]:
                est = norm_estimate_ascent(OperatorSpec("averaging", v, p, r), restarts=4, seed=derived_seed(seed, q, d))
                worst = max(worst, est.value)
    rep.check("r_le_p_at_most_one", worst <= 1 + 1e-8, worst, 1 + 1e-8)
    return rep


def suite_cone(params: dict, seed: int) -> SuiteReport:
    rep = SuiteReport("cone", params, seed)
    for q in params["q"]:
        field = field_of_order(q)
        if field.sqrt[field.neg[1]] < 0:
            rep.check(f"q{q}_minus_one_square", False, detail="-1 must be a square in F_q")
            continue
        for d in params["d"]:
            gram = cone_form(d, field)
            coeffs, P = diagonalize(gram)
            diag = QuadraticForm.from_encodings(field, coeffs)
            vg, vd = enumerate_variety(gram), enumerate_variety(diag)
            rep.check(f"q{q}_d{d}_cardinality", vg.cardinality == vd.cardinality == variety_cardinality(diag), vg.cardinality)
            kind = "cone-odd" if d % 2 else "cone-even"
            h = explicit_subspace(diag, kind)
            rep.check(f"q{q}_d{d}_subspace", verify_subspace(h, vd) and h.k == d // 2, h.k)
            if d % 2:
                k = max_isotropic_dimension(diag)
                rep.check(f"q{q}_d{d}_witt_index", k <= (d - 1) // 2, k, (d - 1) // 2)
            r = (2 * d + 2) / (d - 1) if d % 2 else 2 * d / (d - 2)
            a = norm_lower_witness(OperatorSpec("extension", vg, 2, r), np.ones(vg.cardinality)).value
            b = norm_lower_witness(OperatorSpec("extension", vd, 2, r), np.ones(vd.cardinality)).value
            rep.check(f"q{q}_d{d}_gram_vs_diagonal", abs(a - b) <= 1e-10 * b, abs(a - b), 1e-10 * b)
    qs = params["q"]
    for d in params["d"]:
        r = (2 * d + 2) / (d - 1) if d % 2 else 2 * d / (d - 2)
        if len(qs) >= 3:
            sw = run_sweep(qs, d, "cone", "extension", 2, r, "ascent", seed, restarts=params.get("restarts", 8))
            _slope_check(rep, f"cone_d{d}_2_to_{r:g}_bounded", qs, sw.values, upper=BOUNDED_SLOPE)
    return rep


SUITES = {
    "explicit-formula": (suite_explicit_formula, {"q": [3, 5, 7, 9, 11, 13], "d": [2, 3, 4, 5], "trials": 20}),
    "decay": (suite_decay, {"q": [3, 5, 7, 9, 11, 13], "d": [2, 3, 4, 5], "trials": 5}),
    "tomas-stein": (suite_tomas_stein, {"q": [3, 5, 7], "d": [2, 3, 4], "trials": 5, "restarts": 4}),
    "carbery": (suite_carbery, {"q": [3, 5, 7], "d": [2, 3, 4], "trials": 5, "restarts": 4}),
    "restriction-ineq": (suite_restriction_ineq, {"q": [3, 5, 7, 9], "d": [2, 4], "trials": 200, "C": 10.0}),
    "mainlemma": (suite_mainlemma, {"q": [3, 5, 7], "d": [2, 4], "trials": 50, "C": 10.0}),
    "weaktype": (suite_weaktype, {"cases": [[5, 2], [3, 3]], "p": [1.5, 2.0, 4.0], "trials": 100, "r": 4.0}),
    "extension-sharpness-odd": (
        suite_extension_odd,
        {"q": [3, 5, 7, 11, 13, 17, 19, 23], "d_odd": 3, "r_below": 2.5, "restarts": 16},
    ),
    "extension-sharpness-even": (suite_extension_even, {"q": [3, 5, 7, 9, 11], "d_even": 4, "r_below": 2.5, "restarts": 16}),
    "averaging-sharpness": (
        suite_averaging,
        {
            "q": [3, 5, 7, 11, 13], "q_even": [3, 5, 7, 9, 11], "q_exact": [3, 5, 7, 9, 11],
            "q_small": [3, 5, 7], "r_le_p": [[2, 2], [3, 2], [4, 1.5], [6, 3]], "restarts": 16,
        },
    ),
    "cone": (suite_cone, {"q": [5, 9, 13, 17], "d": [3, 4], "restarts": 8}),
}


def suite_defaults(name: str) -> dict:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    return copy.deepcopy(SUITES[name][1])


def run_suite(name: str, params: dict | None = None, seed: int = 0) -> SuiteReport:
    """Run a named suite; ``params`` override the suite's defaults key by key."""
    merged = suite_defaults(name)
    merged.update(params or {})
    return SUITES[name][0](merged, seed)


__all__ = ["Check", "SuiteReport", "SUITES", "suite_defaults", "run_suite", "BOUNDED_SLOPE", "BLOWUP_SLOPE"]
