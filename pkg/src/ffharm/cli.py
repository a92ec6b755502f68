"""Command-line front end.

Exit codes: 0 success, 1 suite failure, 2 invalid input, 3 cache write failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .charsums import gauss_sum
from .errors import CorruptCacheEntry, FFHarmError, ValidationError
from .experiments import (
    SCHEMES,
    fit_exponent,
    region_necessary_averaging,
    region_necessary_extension,
    region_sufficient_averaging,
    run_sweep,
    scheme_form,
    svg_loglog,
)
from .field import field_of_order
from .formats import dumps, grid_to_csv, jsonable
from .fourier import sigma_inv, sigma_inv_bruteforce, sigma_inv_closed_form
from .grid import decode
from .norms import KINDS, OperatorSpec, exact_norm_2_2, norm_estimate_ascent, witness_battery
from .suites import SUITES, run_suite
from .variety import (
    SUBSPACE_KINDS,
    enumerate_variety,
    find_isotropic_subspace,
    find_square_ratio,
    explicit_subspace,
    variety_cardinality,
    verify_subspace,
)

RANDOMIZED = {"norm", "sweep", "suite"}
NO_KEY = {"out", "threads", "cache", "no_cache", "plot", "func"}


class CacheWriteError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: the command plus every option that affects output."""

    command: str
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        opts = {k: v for k, v in sorted(vars(args).items()) if k not in NO_KEY and k != "command"}
        return cls(args.command, opts)

    @property
    def seed(self):
        return self.options.get("seed")

    def to_json(self) -> dict:
        return {"command": self.command, "params": jsonable(self.options)}

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        def back(k, v):
            if k in ("p", "r") and isinstance(v, str):
                return float(v)
            if k == "coeffs" and v is not None:
                return [tuple(c) if isinstance(c, list) else c for c in v]
            return v

        return cls(doc["command"], {k: back(k, v) for k, v in doc["params"].items()})


# ---------------------------------------------------------------------------
# argument parsing helpers


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _exponent(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad exponent {text!r}") from None


def _coeffs(text: str) -> list:
    """``1,-1,1`` as integers mod p; ``0:1`` is the digit tuple (0, 1)."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            out.append(tuple(int(x) for x in tok.split(":")) if ":" in tok else int(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad coefficient {tok!r}") from None
    return out


def _one(values: list[int], name: str) -> int:
    if len(values) != 1:
        raise ValidationError(f"--{name} takes exactly one value here, got {values}")
    return values[0]


def _form(args):
    q = _one(args.q, "q")
    if args.coeffs is not None:
        return scheme_form("explicit", len(args.coeffs), q, args.coeffs)
    if args.d is None:
        raise ValidationError("give --coeffs or --d with --scheme")
    return scheme_form(args.scheme, _one(args.d, "d"), q, None)


# ---------------------------------------------------------------------------
# commands; each returns (payload dict, tabular rows or None, exit code)


def cmd_field(args):
    f = field_of_order(_one(args.q, "q"))
    x = np.arange(f.q)
    rows = [{"element": int(e), "digits": list(map(int, f.digits_table[e])), "trace": int(f.trace[e]),
             "eta": int(f.eta[e]), "sqrt": None if f.sqrt[e] < 0 else int(f.sqrt[e])} for e in x]
    return {"result": f.to_json(), "rows": rows}, 0


def cmd_gauss(args):
    f = field_of_order(_one(args.q, "q"))
    ts = args.t if args.t is not None else list(range(f.q))
    rows = []
    for t in ts:
        g = gauss_sum(t, f)
        rows.append({"t": t, "re": g.real, "im": g.imag, "abs": abs(g)})
    g1 = gauss_sum(1, f)
    return {"result": {"field": f.to_json(), "G1_squared": g1 * g1, "eta_minus_one_q": int(f.eta[f.neg[1]]) * f.q},
            "rows": rows}, 0


def cmd_variety(args):
    form = _form(args)
    v = enumerate_variety(form)
    res = {**v.to_json(), "closed_form_cardinality": variety_cardinality(form)}
    rows = [{"index": int(i), "point": list(map(int, p))} for i, p in zip(v.indices, v.points)] if args.points else None
    return {"result": res, "rows": rows}, 0


def cmd_sigma_hat(args):
    form = _form(args)
    if args.method == "closed":
        h = sigma_inv_closed_form(form)
    else:
        v = enumerate_variety(form)
        h = sigma_inv_bruteforce(v) if args.method == "brute" else sigma_inv(v)
    if args.format == "csv":
        return {"csv": grid_to_csv(h)}, 0
    pts = decode(np.arange(h.size), h.q, h.d)
    rows = [{"index": i, "point": list(map(int, pts[i])), "re": float(z.real), "im": float(z.imag)} for i, z in enumerate(h.values)]
    return {"result": {"form": form.to_json(), "method": args.method}, "rows": rows}, 0


def cmd_subspaces(args):
    form = _form(args)
    v = enumerate_variety(form)
    h = find_isotropic_subspace(form)
    res = {"form": form.to_json(), "witt_index": h.k, "maximal": h.to_json(), "constructions": {}}
    if form.is_diagonal:
        for kind in SUBSPACE_KINDS:
            try:
                s = explicit_subspace(form, kind)
            except FFHarmError as exc:
                res["constructions"][kind] = {"applicable": False, "reason": str(exc)}
            else:
                res["constructions"][kind] = {"applicable": True, "verified": verify_subspace(s, v), **s.to_json()}
        res["square_ratio"] = find_square_ratio(form)
    return {"result": res}, 0


def cmd_norm(args):
    form = _form(args)
    spec = OperatorSpec(args.kind, enumerate_variety(form), args.p, args.r)
    if args.method == "exact":
        est = exact_norm_2_2(spec)
        battery = []
    elif args.method == "witness":
        battery = witness_battery(spec)
        est = max(battery, key=lambda e: e.value) if battery else None
    else:
        battery = witness_battery(spec)
        est = norm_estimate_ascent(spec, args.restarts, args.max_iter, args.tol, args.seed, workers=args.threads)
    res = {"spec": spec.to_json(), "estimate": None if est is None else est.to_json(),
           "witnesses": [e.to_json() for e in battery]}
    rows = [{"label": e.label, "value": e.value, "method": e.method} for e in battery]
    if est is not None and est.method != "witness":
        rows.append({"label": est.label, "value": est.value, "method": est.method})
    consts = {} if est is None else {"lower_bound": est.value}
    return {"result": res, "rows": rows, "constants": consts}, 0


def cmd_sweep(args):
    d = _one(args.d, "d") if args.d else len(args.coeffs)
    scheme = "explicit" if args.coeffs is not None else args.scheme
    sw = run_sweep(args.q, d, scheme, args.kind, args.p, args.r, args.method, args.seed, args.coeffs,
                   args.witness, args.restarts, args.max_iter, args.tol, args.threads)
    res = {"spec": sw.spec}
    consts = {}
    if len(sw.rows) >= 3:
        res["fit"] = fit_exponent(sw).to_json()
        consts["slope"] = res["fit"]["slope"]
    if args.plot:
        Path(args.plot).write_text(svg_loglog(sw, f"{args.kind} ({args.p:g} -> {args.r:g}), d={d}"))
    rows = [{"q": r.q, "cardinality": r.cardinality, "value": r.value, "method": r.method, "label": r.label,
             "converged": r.converged} for r in sw.rows]
    return {"result": res, "rows": rows, "constants": consts}, 0


def cmd_region(args):
    d = _one(args.d, "d")
    if args.kind == "extension":
        reg = region_necessary_extension(d, args.k, args.square_ratio)
    elif args.kind == "averaging":
        reg = region_necessary_averaging(d, args.k)
    else:
        reg = region_sufficient_averaging(d)
    res = reg.to_json()
    if args.point:
        x, y = (Fraction(t) for t in args.point.split(","))
        res["point"] = {"inv_p": str(x), "inv_r": str(y), "inside": reg.contains(x, y), "violated": reg.violated(x, y)}
    rows = [{"inv_p": str(x), "inv_r": str(y)} for x, y in reg.vertices]
    return {"result": res, "rows": rows}, 0


def cmd_suite(args):
    params = {}
    if args.q is not None:
        params["q"] = args.q
    if args.d is not None:
        params["d"] = args.d
    if args.trials is not None:
        params["trials"] = args.trials
    rep = run_suite(args.name, params, args.seed)
    payload = rep.to_json()
    code = 0 if rep.passed else 1
    if not rep.passed:
        payload["failed"] = rep.failures
    return {"report": payload, "text": rep.to_text()}, code


# ---------------------------------------------------------------------------
# rendering


def render(command: str, args, payload: dict) -> str:
    fmt = args.format
    if "csv" in payload:
        if fmt != "csv":
            raise ValidationError("internal: csv payload for non-csv format")
        return payload["csv"]
    if "report" in payload:
        return dumps(payload["report"]) if fmt == "json" else payload["text"] if fmt == "text" else _rows_csv(
            [c for c in payload["report"]["checks"]])
    rows = payload.get("rows")
    if fmt == "csv":
        if not rows:
            raise ValidationError(f"{command} has no tabular output; use --format json or text")
        return _rows_csv(rows)
    if fmt == "text":
        return _rows_text(payload.get("result"), rows)
    doc = {"command": command, "params": _params(args), "seed": getattr(args, "seed", None), "version": __version__,
           "result": payload.get("result"), "constants": payload.get("constants", {})}
    if rows is not None:
        doc["rows"] = rows
    return dumps(doc)


def _rows_csv(rows: list) -> str:
    import csv
    import io

    buf = io.StringIO()
    keys = list(rows[0].keys())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in rows:
        w.writerow([json.dumps(jsonable(r[k])) if isinstance(r[k], (list, dict)) else jsonable(r[k]) for k in keys])
    return buf.getvalue()


def _rows_text(result, rows) -> str:
    lines = []
    if result is not None:
        lines.append(json.dumps(jsonable(result), sort_keys=True))
    if rows:
        keys = list(rows[0].keys())
        cells = [[_cell(r[k]) for k in keys] for r in rows]
        widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
        lines.append("  ".join(k.rjust(w) for k, w in zip(keys, widths)))
        lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    if isinstance(x, (list, tuple)):
        return "(" + ",".join(map(str, x)) + ")"
    return str(x)


def _params(args) -> dict:
    return RunConfig.from_args(args).to_json()["params"]


# ---------------------------------------------------------------------------
# cache


def cache_dir(args) -> Path:
    if args.cache:
        return Path(args.cache)
    env = os.environ.get("FFHARM_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ffharm"


def cache_key(command: str, args) -> str:
    blob = json.dumps({**RunConfig.from_args(args).to_json(), "seed": args.seed, "version": __version__},
                      sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def cache_lookup(directory: Path, key: str):
    """Stored ``(output, exit code)`` for ``key``, or None; corrupt entries raise."""
    path = directory / f"{key}.json"
    if not path.exists():
        return None
    try:
        entry = json.loads(path.read_text())
        out, code, digest = entry["output"], int(entry["exit"]), entry["sha256"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CorruptCacheEntry(f"unreadable cache entry {path.name}: {exc}") from None
    if hashlib.sha256(out.encode()).hexdigest() != digest or entry.get("key") != key:
        raise CorruptCacheEntry(f"cache entry {path.name} fails its checksum")
    return out, code


def cache_store(directory: Path, key: str, output: str, code: int) -> None:
    entry = {"key": key, "exit": code, "output": output, "sha256": hashlib.sha256(output.encode()).hexdigest()}
    try:
        directory.mkdir(parents=True, exist_ok=True)
        tmp = directory / f".{key}.tmp"
        tmp.write_text(json.dumps(entry))
        os.replace(tmp, directory / f"{key}.json")
    except OSError as exc:
        raise CacheWriteError(str(exc)) from None


# ---------------------------------------------------------------------------


COMMANDS = {
    "field": cmd_field, "gauss": cmd_gauss, "variety": cmd_variety, "sigma-hat": cmd_sigma_hat,
    "subspaces": cmd_subspaces, "norm": cmd_norm, "sweep": cmd_sweep, "region": cmd_region, "suite": cmd_suite,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="ffharm", description="Fourier restriction and averaging experiments over finite fields.")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, q=True, d=True, form=True):
        if q:
            p.add_argument("--q", type=_int_list, help="field size(s), comma-separated")
        if d:
            p.add_argument("--d", type=_int_list, help="dimension(s), comma-separated")
        if form:
            p.add_argument("--coeffs", type=_coeffs, help="coefficients, e.g. 1,-1,1 (digits as 0:1)")
            p.add_argument("--scheme", choices=SCHEMES[:3], default="ones")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--cache", help="cache directory (default $FFHARM_CACHE or ~/.cache/ffharm)")
        p.add_argument("--no-cache", action="store_true")
        return p

    common(sub.add_parser("field", help="field tables"), d=False, form=False)
    g = common(sub.add_parser("gauss", help="Gauss sums G_t"), d=False, form=False)
    g.add_argument("--t", type=_int_list, help="parameters t (encodings); default all")
    v = common(sub.add_parser("variety", help="enumerate S"))
    v.add_argument("--points", action="store_true", help="list the points")
    s = common(sub.add_parser("sigma-hat", help="(d sigma)^vee on the dual grid"))
    s.add_argument("--method", choices=("closed", "brute", "engine"), default="brute")
    common(sub.add_parser("subspaces", help="Witt index and explicit isotropic subspaces"))

    def norm_flags(p):
        p.add_argument("--kind", choices=KINDS, default="extension")
        p.add_argument("--p", type=_exponent, required=True)
        p.add_argument("--r", type=_exponent, required=True)
        p.add_argument("--restarts", type=int, default=16)
        p.add_argument("--max-iter", type=int, default=500)
        p.add_argument("--tol", type=float, default=1e-8)

    n = common(sub.add_parser("norm", help="operator-norm lower bounds"))
    norm_flags(n)
    n.add_argument("--method", choices=("ascent", "witness", "exact"), default="ascent")
    w = common(sub.add_parser("sweep", help="norm estimates across q with a log-log fit"))
    norm_flags(w)
    w.add_argument("--method", choices=("ascent", "witness", "exact"), default="ascent")
    w.add_argument("--witness", help="battery label for --method witness (e.g. M, Omega, delta0)")
    w.add_argument("--plot", help="also write an SVG log-log plot here")
    r = common(sub.add_parser("region", help="exponent regions in the (1/p, 1/r) square"), q=False, form=False)
    r.add_argument("--kind", choices=("extension", "averaging", "averaging-sufficient"), default="extension")
    r.add_argument("--k", type=int, default=None, help="dimension of a subspace inside S")
    r.add_argument("--square-ratio", action="store_true", help="some -a_i/a_j is a square")
    r.add_argument("--point", help="test a point 1/p,1/r (fractions allowed)")
    u = common(sub.add_parser("suite", help="run a named verification suite"), form=False)
    u.add_argument("name", help=", ".join(SUITES))
    u.add_argument("--trials", type=int, default=None)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = args.command
    try:
        randomized = command == "suite" or (command in RANDOMIZED and args.method == "ascent")
        if randomized and args.seed is None:
            raise ValidationError(f"{command} needs --seed")
        if args.seed is None:
            args.seed = 0
        key = cache_key(command, args)
        directory = cache_dir(args)
        hit = None
        if not args.no_cache:
            try:
                hit = cache_lookup(directory, key)
            except CorruptCacheEntry as exc:
                print(f"warning: {exc}; recomputing", file=sys.stderr)
        if hit is not None:
            output, code = hit
        else:
            payload, code = COMMANDS[command](args)
            output = render(command, args, payload)
            if code == 1:
                failed = payload.get("report", {}).get("failed", [])
                print(f"suite failed: {', '.join(failed)}", file=sys.stderr)
    except (FFHarmError, ZeroDivisionError) as exc:
        print(f"error: {type(exc).__name__}: {exc}".splitlines()[0], file=sys.stderr)
        return 2

    if args.out:
        try:
            Path(args.out).write_text(output)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(output)
    if hit is None and not args.no_cache:
        try:
            cache_store(directory, key, output, code)
        except CacheWriteError as exc:
            print(f"error: cache write failed: {exc}", file=sys.stderr)
            return 3
    return code


if __name__ == "__main__":
    sys.exit(main())
