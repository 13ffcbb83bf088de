"""Command-line front end.

Every subcommand is driven by one flat JSON-compatible config dict, built
either from flags, from ``--config path`` or from ``--stdin``; flags override
config values.  Results are printed as a JSON report document (or CSV for
tabular commands).  Exit status: 0 success, 1 certification failure,
2 usage or domain error (one JSON line on stderr with an error code).
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .airy import airy_validate
from .certify import (
    certify_gamma_lemma7,
    certify_S4_sym_thm9,
    certify_T2_thm5,
    certify_T4_sym_thm7,
    certify_T4_thm10,
)
from .errors import DomainError, TuranKitError
from .evalkernel import TuranOp, turan_grid
from .gpoly import g_poly_bound
from .identities import IdentityId, verify_identity
from .recurrence import ALIASES, FAMILIES, NormKind, custom_family, load_family, test_sequence_params
from .report import dumps, jsonable
from .spectra import (
    all_zeros_small,
    bound_report,
    extreme_zeros,
    gershgorin_interval,
    perturbation_gap,
    thm2_bound,
    thm2_delta_cap,
)
from .wendroff import wendroff_extend

DEFAULT_POINTS = 1001
IDENTITY_TOL = 1e-10


class UsageError(TuranKitError):
    code = "USAGE"


# ---------------------------------------------------------------- config validation

FAMILY_KEYS = {"family", "params", "normalization", "custom"}
OUTPUT_KEYS = {"format", "out"}

# command -> (needs a family, allowed parameter keys)
COMMANDS: dict[str, tuple[bool, set[str]]] = {
    "families": (False, set()),
    "zeros": (True, {"k", "tol"}),
    "all-zeros": (True, {"k", "tol"}),
    "bounds": (True, {"k", "delta", "tol"}),
    "certify": (True, {"theorem", "k", "j", "r", "s", "gamma", "n"}),
    "scan": (True, {"op", "k", "xmin", "xmax", "points", "xi"}),
    "gpoly": (False, {"r", "s", "gamma", "k"}),
    "thm2": (False, {"r", "s", "gamma", "k", "delta"}),
    "airy-validate": (False, {"c", "r", "k", "j"}),
    "wendroff": (False, {"xs", "ys"}),
    "identity": (True, {"id", "k", "points", "seed", "x", "precision"}),
    "perturb": (True, {"k", "amplitude", "trials", "seed"}),
}

THEOREMS = ("thm5", "cor1", "thm6", "thm7", "thm9", "thm10", "lemma7")
SCAN_OPS = ("T2", "T4", "S2", "S4")


def _int(cfg, key, lo=None, default=None):
    v = cfg.get(key, default)
    if v is None:
        raise UsageError(f"missing required parameter {key!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)) or float(v) != int(v):
        raise UsageError(f"parameter {key!r} must be an integer, got {v!r}")
    v = int(v)
    if lo is not None and v < lo:
        raise DomainError(f"parameter {key!r} must be >= {lo}, got {v}")
    return v


def _float(cfg, key, default=None, positive=False):
    v = cfg.get(key, default)
    if v is None:
        raise UsageError(f"missing required parameter {key!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise UsageError(f"parameter {key!r} must be a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v) or (positive and not v > 0):
        raise DomainError(f"parameter {key!r} must be {'positive and ' if positive else ''}finite, got {v}")
    return v


def _choice(cfg, key, choices, default=None):
    v = cfg.get(key, default)
    if v not in choices:
        raise UsageError(f"parameter {key!r} must be one of {list(choices)}, got {v!r}")
    return v


def validate_config(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cmd = cfg.get("command")
    if cmd not in COMMANDS:
        raise UsageError(f"unknown or missing command {cmd!r}; choose from {sorted(COMMANDS)}")
    needs_family, allowed = COMMANDS[cmd]
    if cmd == "certify" and cfg.get("theorem") == "lemma7":
        needs_family = False
    permitted = {"command"} | allowed | OUTPUT_KEYS | (FAMILY_KEYS if needs_family else set())
    unknown = set(cfg) - permitted
    if unknown:
        raise UsageError(f"unknown keys for {cmd}: {sorted(unknown)}")
    if needs_family and "family" not in cfg:
        raise UsageError(f"{cmd} needs a 'family'")
    if cfg.get("format", "json") not in ("json", "csv"):
        raise UsageError("format must be 'json' or 'csv'")
    return cfg


# ---------------------------------------------------------------- custom table formulas

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.BitXor: operator.pow,  # "2^k" reads as a power
}
_FUNCS = {"sqrt": np.sqrt, "exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos}
_CONSTS = {"pi": math.pi, "e": math.e}


def eval_formula(expr: str, k: np.ndarray) -> np.ndarray:
    """Evaluate an arithmetic formula in the index ``k`` (no names beyond k, pi, e, sqrt, exp, log, sin, cos)."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"bad table formula {expr!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id == "k":
                return k.astype(float)
            if node.id in _CONSTS:
                return _CONSTS[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1:
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise DomainError(f"unsupported element in table formula {expr!r}")

    with np.errstate(all="ignore"):
        out = np.broadcast_to(np.asarray(ev(tree), dtype=float), k.shape).copy()
    return out


def _expand_custom(tables: dict, length: int) -> dict:
    """Replace formula strings by tables of ``length`` entries; ``a``/``a2`` get index 0 forced to 0."""
    if not isinstance(tables, dict):
        raise DomainError("custom tables must be an object")
    ks = np.arange(length)
    out = {}
    for key, val in tables.items():
        if isinstance(val, str):
            v = eval_formula(val, ks)
            if key in ("a", "a2"):
                v[0] = 0.0
            out[key] = v.tolist()
        else:
            out[key] = val
    return out


_INLINE_TABLE_KEYS = {"a": "a", "a2": "a2", "a²": "a2", "a^2": "a2", "b": "b", "c": "c"}


def _inline_tables(family: dict) -> dict:
    """``{"custom a²": "2^k", "custom b": [..]}`` to the plain table mapping."""
    out = {}
    for key, val in family.items():
        head, _, name = str(key).partition(" ")
        if head != "custom" or name not in _INLINE_TABLE_KEYS:
            raise UsageError(f"inline family key {key!r} must read 'custom a', 'custom a²', 'custom b' or 'custom c'")
        out[_INLINE_TABLE_KEYS[name]] = val
    return out


def spec_from_config(cfg: dict):
    doc = {key: cfg[key] for key in FAMILY_KEYS if key in cfg}
    if isinstance(doc.get("family"), dict):
        if "custom" in doc:
            raise UsageError("give custom tables either inline in 'family' or under 'custom', not both")
        doc["custom"] = _inline_tables(doc["family"])
        doc["family"] = "custom"
    if doc.get("family") == "custom" and isinstance(doc.get("custom"), dict):
        if any(isinstance(v, str) for v in doc["custom"].values()):
            # formulas need a length; keep enough indices for every operator at k
            need = _int(cfg, "k", lo=1) + 5 if "k" in cfg else None
            if need is None:
                raise UsageError("formula tables need 'k' to fix their length")
            doc["custom"] = _expand_custom(doc["custom"], need)
    return load_family(doc)


# ---------------------------------------------------------------- commands

def _workers() -> int:
    raw = os.environ.get("TURANKIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"TURANKIT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"TURANKIT_THREADS must be a positive integer, got {raw!r}")
    return n


def cmd_families(cfg):
    fams = {
        name: {"params": list(names), "default_normalization": norm.name}
        for name, (_, names, norm) in FAMILIES.items()
    }
    aliases = {name: {"family": base, "params": params, "normalization": norm.name} for name, (base, params, norm) in ALIASES.items()}
    return {"families": fams, "aliases": aliases, "custom": {"tables": ["a", "a2", "b", "c"]}}, 0


def cmd_zeros(cfg):
    spec = spec_from_config(cfg)
    tol = _float(cfg, "tol", positive=True) if "tol" in cfg else None
    z = extreme_zeros(spec, _int(cfg, "k", lo=1), tol)
    return {"spec": spec.describe(), "zeros": z}, 0


def cmd_all_zeros(cfg):
    spec = spec_from_config(cfg)
    tol = _float(cfg, "tol", positive=True) if "tol" in cfg else None
    k = _int(cfg, "k", lo=1)
    return {"spec": spec.describe(), "k": k, "zeros": all_zeros_small(spec, k, tol)}, 0


def cmd_bounds(cfg):
    spec = spec_from_config(cfg)
    delta = _float(cfg, "delta") if "delta" in cfg else None
    tol = _float(cfg, "tol", positive=True) if "tol" in cfg else None
    rep = bound_report(spec, _int(cfg, "k", lo=3), delta=delta, tol=tol)
    return rep, 0


def cmd_certify(cfg):
    theorem = _choice(cfg, "theorem", THEOREMS)
    if theorem == "lemma7":
        params = test_sequence_params(_float(cfg, "r"), _float(cfg, "s"), _float(cfg, "gamma"))
        n = _int(cfg, "n", lo=1, default=10_000)
        rep = certify_gamma_lemma7(params, n)
        return rep, 0 if rep.passed else 1
    spec = spec_from_config(cfg)
    k = _int(cfg, "k", lo=1)
    if theorem == "thm5":
        rep = certify_T2_thm5(spec, k, "explicit-c")
    elif theorem == "cor1":
        rep = certify_T2_thm5(spec, k, "balanced")
    elif theorem == "thm6":
        rep = certify_T2_thm5(spec, k, "chain")
    elif theorem == "thm7":
        rep = certify_T4_sym_thm7(spec, k)
    elif theorem == "thm9":
        rep = certify_S4_sym_thm9(spec, k)
    else:
        rep = certify_T4_thm10(spec, k, _int(cfg, "j", lo=1, default=1))
    return rep, 0 if rep.passed else 1


def default_scan_window(spec, k) -> tuple[float, float]:
    """One unit beyond the Gershgorin interval, so every zero is inside."""
    lo, hi = gershgorin_interval(spec, k)
    return lo - 1.0, hi + 1.0


def cmd_scan(cfg):
    spec = spec_from_config(cfg)
    op = _choice(cfg, "op", SCAN_OPS)
    k = _int(cfg, "k", lo=2 if op in ("T4", "S4") else 1)
    points = _int(cfg, "points", lo=2, default=DEFAULT_POINTS)
    lo, hi = default_scan_window(spec, k)
    xmin = _float(cfg, "xmin", default=lo)
    xmax = _float(cfg, "xmax", default=hi)
    if not xmin < xmax:
        raise DomainError("need xmin < xmax")
    x = np.linspace(xmin, xmax, points)
    grid = turan_grid(spec, TuranOp(op), k, x)
    table = {
        "x": grid.x,
        "value_mantissa": grid.values.m,
        "value_exponent2": grid.values.e,
        "sign": grid.sign,
    }
    payload = {
        "spec": spec.describe(),
        "op": op,
        "k": k,
        "coefficients": grid.coefficients,
        "window": [xmin, xmax],
        "negative_points": int(np.sum(grid.sign < 0)),
        "table": table,
    }
    return payload, 0


def cmd_gpoly(cfg):
    params = test_sequence_params(_float(cfg, "r"), _float(cfg, "s"), _float(cfg, "gamma"))
    return g_poly_bound(params, _int(cfg, "k", lo=2)), 0


def cmd_thm2(cfg):
    params = test_sequence_params(_float(cfg, "r"), _float(cfg, "s"), _float(cfg, "gamma"))
    k = _int(cfg, "k", lo=1)
    delta = _float(cfg, "delta")
    value = thm2_bound(params, k, delta)
    return {
        "params": params,
        "k": k,
        "delta": delta,
        "delta_cap": thm2_delta_cap(params),
        "bound": value,
        "asymptotic": True,
    }, 0


def cmd_airy(cfg):
    k = _int(cfg, "k", lo=2)
    if k > 10_000:
        raise DomainError("airy-validate supports k <= 10000")
    j = _int(cfg, "j", lo=1, default=1)
    if j > 3:
        raise DomainError("airy-validate supports j <= 3")
    return airy_validate(_float(cfg, "c", positive=True), _float(cfg, "r", positive=True), k, j), 0


def cmd_wendroff(cfg):
    xs, ys = cfg.get("xs"), cfg.get("ys")
    if not isinstance(xs, list) or not isinstance(ys, list):
        raise UsageError("wendroff needs lists 'xs' and 'ys'")
    return wendroff_extend(xs, ys), 0


def cmd_identity(cfg):
    spec = spec_from_config(cfg)
    ident = IdentityId(_choice(cfg, "id", [i.value for i in IdentityId]))
    k = _int(cfg, "k", lo=0)
    precision = _choice(cfg, "precision", ("extended", "double"), default="extended")
    if "x" in cfg:
        xs = cfg["x"] if isinstance(cfg["x"], list) else [cfg["x"]]
        x = np.array([float(v) for v in xs])
    else:
        lo, hi = gershgorin_interval(spec, k + 1)
        X = max(abs(lo), abs(hi)) + 2.0
        rng = np.random.default_rng(_int(cfg, "seed", lo=0, default=0))
        x = rng.uniform(-X, X, _int(cfg, "points", lo=1, default=100))
    res = np.atleast_1d(verify_identity(ident, spec, k, x, precision))
    payload = {
        "spec": spec.describe(),
        "id": ident.value,
        "k": k,
        "precision": precision,
        "tolerance": IDENTITY_TOL,
        "max_residual": float(res.max()),
        "x": x,
        "residual": res,
        "passed": bool(res.max() <= IDENTITY_TOL),
    }
    return payload, 0 if payload["passed"] else 1


def cmd_perturb(cfg):
    spec = spec_from_config(cfg)
    if spec.normalization.kind is not NormKind.ORTHONORMAL:
        from .errors import WrongHypothesisError

        raise WrongHypothesisError("perturb needs an orthonormal family")
    k = _int(cfg, "k", lo=2)
    amp = _float(cfg, "amplitude", default=1e-3, positive=True)
    trials = _int(cfg, "trials", lo=1, default=100)
    rng = np.random.default_rng(_int(cfg, "seed", lo=0, default=0))
    a, b, _ = spec.coefficients(k)
    draws = [(rng.uniform(-amp, amp, k + 1), rng.uniform(-amp, amp, k + 1)) for _ in range(trials)]

    def one(d):
        da, db = d
        pa = a + da
        pa[0] = 0.0
        if np.any(pa[1:] <= 0):
            raise DomainError("perturbation made an a_k nonpositive; lower the amplitude")
        other = custom_family(pa, b + db, normalization="orthonormal")
        return perturbation_gap(spec, other, k)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        results = list(pool.map(one, draws))
    ratios = [r.actual_gap / r.bound for r in results if r.bound > 0]
    payload = {
        "spec": spec.describe(),
        "k": k,
        "amplitude": amp,
        "trials": results,
        "all_hold": all(r.holds for r in results),
        "max_gap_over_bound": max(ratios) if ratios else 0.0,
    }
    return payload, 0 if payload["all_hold"] else 1


HANDLERS = {
    "families": cmd_families,
    "zeros": cmd_zeros,
    "all-zeros": cmd_all_zeros,
    "bounds": cmd_bounds,
    "certify": cmd_certify,
    "scan": cmd_scan,
    "gpoly": cmd_gpoly,
    "thm2": cmd_thm2,
    "airy-validate": cmd_airy,
    "wendroff": cmd_wendroff,
    "identity": cmd_identity,
    "perturb": cmd_perturb,
}


def run(cfg: dict) -> tuple[dict, int]:
    """Execute one config; returns the report document and the exit status."""
    validate_config(cfg)
    t0 = time.perf_counter()
    payload, status = HANDLERS[cfg["command"]](cfg)
    doc = {
        "tool": "turankit",
        "version": __version__,
        "input": {k: v for k, v in cfg.items() if k not in OUTPUT_KEYS},
        "status": "pass" if status == 0 else "fail",
        "result": jsonable(payload),
        "wall_time": time.perf_counter() - t0,
    }
    return doc, status


# ---------------------------------------------------------------- CSV

def to_csv(doc: dict) -> str:
    cmd = doc["input"]["command"]
    res = doc["result"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if cmd == "scan":
        t = res["table"]
        w.writerow(["x", "value_mantissa", "value_exponent2", "sign"])
        for row in zip(t["x"], t["value_mantissa"], t["value_exponent2"], t["sign"]):
            w.writerow([repr(float(row[0])), repr(float(row[1])), int(row[2]), int(row[3])])
    elif cmd == "bounds":
        z = res["zeros"]
        w.writerow(["name", "target", "side", "value", "applicable", "certified", "x_1k", "x_kk"])
        for e in res["entries"]:
            w.writerow([e["name"], e["target"], e["side"], e["value"], e["applicable"], e["certified"], z["x_1k"], z["x_kk"]])
    elif cmd == "zeros":
        z = res["zeros"]
        w.writerow(["k", "x_1k", "x_kk", "tol"])
        w.writerow([z["k"], z["x_1k"], z["x_kk"], z["tol"]])
    elif cmd == "all-zeros":
        w.writerow(["index", "x"])
        for i, v in enumerate(res["zeros"], start=1):
            w.writerow([i, v])
    elif cmd == "identity":
        w.writerow(["x", "residual"])
        for x, r in zip(res["x"], res["residual"]):
            w.writerow([x, r])
    else:
        raise UsageError(f"csv output is not available for {cmd}; use json")
    return buf.getvalue()


# ---------------------------------------------------------------- argparse

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from None


def _num_or_json(text):
    try:
        v = json.loads(text)
    except json.JSONDecodeError:
        return text  # angles like "pi/2" pass through
    return v


_FLAG_TYPES = {
    "family": str,
    "params": _json_arg,
    "normalization": str,
    "custom": _json_arg,
    "k": int,
    "j": int,
    "n": int,
    "points": int,
    "seed": int,
    "trials": int,
    "tol": float,
    "delta": float,
    "r": float,
    "s": float,
    "gamma": float,
    "xmin": float,
    "xmax": float,
    "xi": float,
    "c": float,
    "amplitude": float,
    "theorem": str,
    "op": str,
    "id": str,
    "precision": str,
    "xs": _json_arg,
    "ys": _json_arg,
    "x": _num_or_json,
}


def build_parser() -> argparse.ArgumentParser:
    io_opts = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    io_opts.add_argument("--config", help="read the run config from a JSON file")
    io_opts.add_argument("--stdin", action="store_true", help="read the run config as JSON from stdin")
    io_opts.add_argument("--out", help="write the report here instead of stdout")
    io_opts.add_argument("--format", choices=("json", "csv"))

    parser = _Parser(prog="turankit", description="Turan determinants, certificates and zero bounds", parents=[io_opts])
    parser.add_argument("--version", action="version", version=f"turankit {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for cmd, (needs_family, allowed) in COMMANDS.items():
        p = sub.add_parser(cmd, parents=[io_opts], argument_default=argparse.SUPPRESS)
        keys = sorted(allowed | (FAMILY_KEYS if needs_family or cmd == "certify" else set()))
        for key in keys:
            kw = {"type": _FLAG_TYPES[key], "dest": key}
            if key == "theorem":
                kw["choices"] = THEOREMS
            elif key == "op":
                kw["choices"] = SCAN_OPS
            elif key == "id":
                kw["choices"] = [i.value for i in IdentityId]
            p.add_argument(f"--{key}", **kw)
    return parser


def _error_line(exc: TuranKitError) -> str:
    return json.dumps({"error": {"code": exc.code, "message": str(exc)}}, sort_keys=True)


def load_config(ns: argparse.Namespace) -> dict:
    args = vars(ns).copy()
    cfg: dict = {}
    if args.pop("stdin", False):
        text = sys.stdin.read()
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed JSON on stdin: {exc}") from None
    path = args.pop("config", None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cfg = dict(cfg)
    for key, val in args.items():
        if val is not None:
            cfg[key] = val
    return cfg


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = load_config(ns)
        doc, status = run(cfg)
        fmt = cfg.get("format", "json")
        text = to_csv(doc) if fmt == "csv" else dumps(doc) + "\n"
    except TuranKitError as exc:
        print(_error_line(exc), file=sys.stderr)
        return 2
    out = cfg.get("out")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
