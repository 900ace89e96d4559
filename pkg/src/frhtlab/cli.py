"""``frht-lab``: transforms and theorem checks from the command line.

Every subcommand prints a short summary, and can write a CSV sweep
(columns: xi|eps|x, re, im, err_estimate, converged) and a JSON report.
Exit status: 0 when every requested check passes, 1 on a failed check,
non-convergence or an unwritable output, 2 on bad flags or configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

import jsonschema
import numpy as np

from . import __version__
from ._errors import ConfigError, DomainError
from .asymptotics import EpsSchedule, check_slowly_varying
from .dsl import FunctionSpec, ParseError, evaluate, parse_expr
from .quadrature import QuadratureOptions
from .special import HEtaPair
from .theorems import (IvtFvtCase, TauberianCase, verify_fvt, verify_ivt, verify_tauberian,
                       verify_tbound)
from .transform import check_additivity, make_params, tabulate
from .zemanian import CompactDistribution, TestFunction, canonical_test_function, gamma_seminorm

COMMANDS = ("transform", "identities", "tauberian", "tbound", "ivt", "fvt", "seminorm", "svf")

# option name -> JSON schema type; shared by the parser and the config schema
_NUM = {"type": ["number", "string"]}
_STR = {"type": "string"}
_INT = {"type": "integer", "minimum": 0}
_BOOL = {"type": "boolean"}
_COMMON = {"out_csv": _STR, "out_json": _STR, "abs_tol": {"type": "number"},
           "rel_tol": {"type": "number"}, "quiet": _BOOL}
_OPTIONS = {
    "transform": {"alpha": _NUM, "mu": _NUM, "fn": _STR, "xi_grid": _STR,
                  "route": {"enum": ["direct", "hankel"]}, "unitary": _BOOL},
    "identities": {"alpha": _NUM, "beta": _NUM, "mu": _NUM, "fn": _STR, "xi": _STR,
                   "grid": _STR, "unitary": _BOOL, "tol": {"type": "number"}},
    "tauberian": {"alpha": _NUM, "mu": _NUM, "fn": _STR, "m": _NUM, "L": _STR,
                  "xi_window": _STR, "N": _NUM, "C": _NUM, "eps0": _NUM,
                  "witnesses": _INT, "schedule": _STR},
    "tbound": {"alpha": _NUM, "mu": _NUM, "fn": _STR, "m": _NUM, "L": _STR,
               "witness": _INT, "schedule": _STR},
    "ivt": {"alpha": _NUM, "mu": _NUM, "eta": _NUM, "g": _STR, "rho": _NUM,
            "probe": _STR, "bump": _STR, "tol": {"type": "number"}},
    "fvt": {"alpha": _NUM, "mu": _NUM, "eta": _NUM, "g": _STR, "delta": _NUM,
            "probe": _STR, "bump": _STR, "tol": {"type": "number"}},
    "seminorm": {"mu": _NUM, "fn": _STR, "m": _INT, "k": _INT},
    "svf": {"L": _STR, "site": {"enum": ["origin", "infinity"]}, "a": _STR,
            "eps_min": {"type": "number"}, "tol": {"type": "number"}},
}


def config_schema():
    """JSON schema for ``--config`` files: one object per command, no unknown keys."""
    variants = []
    for cmd, opts in _OPTIONS.items():
        props = {"command": {"const": cmd}, **opts, **_COMMON}
        variants.append({"type": "object", "properties": props, "required": ["command"],
                         "additionalProperties": False})
    return {"$schema": "http://json-schema.org/draft-07/schema#",
            "title": "frht-lab run configuration", "oneOf": variants}


# ---------------------------------------------------------------- parsing helpers

def parse_real(text):
    """A real number or a constant expression such as ``pi/3`` or ``2pi/3``."""
    if isinstance(text, (int, float)):
        return float(text)
    src = re.sub(r"(\d)\s*(pi)\b", r"\1*\2", str(text))
    val = complex(evaluate(parse_expr(src), np.array([1.0]))[0])
    if val.imag != 0 or not math.isfinite(val.real):
        raise DomainError(f"{text!r} is not a finite real number")
    return val.real


def parse_function(text):
    if text.startswith("csv:"):
        return FunctionSpec.from_csv(text[4:])
    return FunctionSpec.parse(text)


def parse_list(text):
    return [parse_real(t) for t in str(text).split(",") if t.strip()]


def parse_grid(text):
    """``log:lo:hi:n`` or ``lin:lo:hi:n``."""
    parts = str(text).split(":")
    if len(parts) != 4 or parts[0] not in ("log", "lin"):
        raise DomainError(f"grid must look like log:lo:hi:n, got {text!r}")
    lo, hi, n = parse_real(parts[1]), parse_real(parts[2]), int(parts[3])
    if not (0 < lo < hi) or n < 2:
        raise DomainError(f"bad grid {text!r}")
    return np.geomspace(lo, hi, n) if parts[0] == "log" else np.linspace(lo, hi, n)


def parse_schedule(text):
    eps0, rho, J = str(text).split(":")
    return EpsSchedule(parse_real(eps0), parse_real(rho), int(J))


def parse_bump(text):
    a, b = (parse_real(t) for t in str(text).split(":"))
    return CompactDistribution(FunctionSpec.builtin("bump", a=a, b=b), (a, b), 0)


# ---------------------------------------------------------------- output

def _fmt(x):
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(float(obj.real)), "im": _jsonable(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj, indent=0):
    """JSON text with sorted keys and floats at 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, float):
        if math.isnan(obj):
            return '"nan"'
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return _fmt(obj)
    return json.dumps(obj)


def emit_report(report, path):
    """Write a report dict (or TheoremReport) as deterministic JSON."""
    data = report.to_dict() if hasattr(report, "to_dict") else report
    text = dumps(_jsonable(data)) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def emit_csv(path, head, rows):
    """rows: iterables of (abscissa, complex value, err_estimate, converged)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([head, "re", "im", "err_estimate", "converged"])
    for x, v, err, ok in rows:
        v = complex(v)
        w.writerow([_fmt(x), _fmt(v.real), _fmt(v.imag), _fmt(err), int(bool(ok))])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


# ---------------------------------------------------------------- commands

def _opts(ns):
    return QuadratureOptions(abs_tol=ns.abs_tol, rel_tol=ns.rel_tol)


def cmd_transform(ns):
    p = make_params(parse_real(ns.alpha), parse_real(ns.mu), ns.unitary)
    grid = tabulate(p, parse_function(ns.fn), parse_grid(ns.xi_grid), _opts(ns), ns.route)
    rows = [(x, v, d.err_estimate, d.converged)
            for x, v, d in zip(grid.xi, grid.values, grid.diagnostics)]
    report = {"command": "transform", "alpha": p.alpha, "mu": p.mu, "route": ns.route,
              "points": len(rows), "converged": grid.converged, "pass": grid.converged}
    return report, ("xi", rows), f"{len(rows)} points, converged={grid.converged}"


def cmd_identities(ns):
    f = parse_function(ns.fn) if ns.fn else FunctionSpec.builtin("gaussian", mu=parse_real(ns.mu))
    rep = check_additivity(parse_real(ns.alpha), parse_real(ns.beta), parse_real(ns.mu), f,
                           parse_list(ns.xi), _opts(ns), parse_grid(ns.grid), ns.unitary)
    rep["tolerance"] = ns.tol
    rep["pass"] = bool(rep["max_discrepancy"] < ns.tol)
    rows = [(r["xi"], r["rhs"], r["discrepancy"], r["converged"]) for r in rep["points"]]
    return rep, ("xi", rows), f"max discrepancy {rep['max_discrepancy']:.3e} (tol {ns.tol:g})"


def cmd_tauberian(ns):
    mu = parse_real(ns.mu)
    p = make_params(parse_real(ns.alpha), mu)
    lo, hi = (parse_real(t) for t in ns.xi_window.split(":"))
    case = TauberianCase(parse_function(ns.fn), p, parse_real(ns.m), parse_function(ns.L),
                         (lo, hi), parse_real(ns.N), parse_real(ns.C), parse_real(ns.eps0))
    wit = [canonical_test_function(mu, n) for n in range(ns.witnesses)]
    rep = verify_tauberian(case, wit, parse_schedule(ns.schedule), _opts(ns))
    d = rep.diagnostics
    rows = [(x, v, 0.0, True) for x, v in zip(d["xi"], d["M_xi"])]
    return rep, ("xi", rows), _verdict_line(rep)


def cmd_tbound(ns):
    mu = parse_real(ns.mu)
    p = make_params(parse_real(ns.alpha), mu)
    case = TauberianCase(parse_function(ns.fn), p, parse_real(ns.m), parse_function(ns.L))
    sched = parse_schedule(ns.schedule)
    rep = verify_tbound(case, canonical_test_function(mu, ns.witness), sched, _opts(ns))
    rows = [(e, r, 0.0, True) for e, r in zip(sched.values, rep.conclusion["ratios"])]
    return rep, ("eps", rows), _verdict_line(rep)


def _ivt_fvt(ns, verify, target):
    mu = parse_real(ns.mu)
    p = make_params(parse_real(ns.alpha), mu)
    eta = parse_real(ns.eta)
    HEtaPair(mu, eta)
    h = parse_bump(ns.bump) if ns.bump else None
    case = IvtFvtCase(parse_function(ns.g), p, eta, complex(parse_real(target)),
                      tuple(parse_list(ns.probe)), h, ns.tol)
    rep = verify(case, _opts(ns))
    c = rep.conclusion or {"xi": [], "measured": [], "deviation": [], "converged": []}
    rows = list(zip(c["xi"], c["measured"], c["deviation"], c["converged"]))
    return rep, ("xi", rows), _verdict_line(rep)


def cmd_ivt(ns):
    return _ivt_fvt(ns, verify_ivt, ns.rho)


def cmd_fvt(ns):
    return _ivt_fvt(ns, verify_fvt, ns.delta)


def cmd_seminorm(ns):
    phi = TestFunction(parse_function(ns.fn), parse_real(ns.mu))
    r = gamma_seminorm(phi, ns.m, ns.k)
    rep = {"command": "seminorm", "m": r.m, "k": r.k, "value": r.value, "argmax": r.argmax,
           "x_max": r.x_max, "unbounded": r.unbounded, "pass": not r.unbounded}
    return rep, None, f"gamma_{{{r.m},{r.k}}} = {r.value:.12g}" + (" (unbounded)" if r.unbounded else "")


def cmd_svf(ns):
    L = parse_function(ns.L)
    sched = EpsSchedule.down_to(ns.eps_min, eps0=0.1)
    rep = check_slowly_varying(L, ns.site, parse_list(ns.a), sched, ns.tol)
    eps = sched.values
    t = eps if ns.site == "origin" else 1 / eps
    rows = [(e, v, 0.0, True) for e, v in zip(eps, L(t))]
    devs = ", ".join(f"a={r['a']:.4g}: {r['final_deviation']:.4f}" for r in rep["rows"])
    return rep, ("eps", rows), f"final deviations {devs}"


def _verdict_line(rep):
    parts = [f"{k}={'ok' if v['pass'] else 'FAILED'}" for k, v in rep.hypotheses.items()]
    concl = rep.conclusion
    parts.append("conclusion=" + ("not evaluated" if concl is None else
                                  ("ok" if concl["pass"] else "FAILED")))
    return ", ".join(parts)


HANDLERS = {"transform": cmd_transform, "identities": cmd_identities, "tauberian": cmd_tauberian,
            "tbound": cmd_tbound, "ivt": cmd_ivt, "fvt": cmd_fvt, "seminorm": cmd_seminorm,
            "svf": cmd_svf}


# ---------------------------------------------------------------- argparse

def build_parser():
    ap = argparse.ArgumentParser(prog="frht-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"frht-lab {__version__}")
    ap.add_argument("--config", help="JSON run configuration (see docs/config_schema.json)")
    sub = ap.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--out-csv", dest="out_csv")
        p.add_argument("--out-json", dest="out_json")
        p.add_argument("--abs-tol", dest="abs_tol", type=float, default=1e-10)
        p.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-10)
        p.add_argument("--quiet", action="store_true")
        return p

    p = common(sub.add_parser("transform", help="tabulate H^alpha_mu f on a grid"))
    p.add_argument("--alpha", default="pi/2")
    p.add_argument("--mu", default="0")
    p.add_argument("--fn", default="builtin:gaussian:mu=0")
    p.add_argument("--xi-grid", dest="xi_grid", default="log:1e-3:50:512")
    p.add_argument("--route", choices=["direct", "hankel"], default="direct")
    p.add_argument("--unitary", action="store_true")

    p = common(sub.add_parser("identities", help="additivity H^a H^b = H^(a+b)"))
    p.add_argument("--alpha", default="pi/4")
    p.add_argument("--beta", default="pi/4")
    p.add_argument("--mu", default="0")
    p.add_argument("--fn", default=None)
    p.add_argument("--xi", default="0.5,1,2")
    p.add_argument("--grid", default="log:1e-3:12:400")
    p.add_argument("--unitary", action="store_true")
    p.add_argument("--tol", type=float, default=1e-4)

    for name, helptext in (("tauberian", "Tauberian theorem conditions and identity"),
                           ("tbound", "boundedness transfer")):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--alpha", default="pi/3")
        p.add_argument("--mu", default="1")
        p.add_argument("--fn", default="builtin:chirped_power:a=-1.25,c1=0.57735026918962584")
        p.add_argument("--m", default="-1.25")
        p.add_argument("--L", default="1")
        p.add_argument("--schedule", default="0.5:0.7:30")
        if name == "tauberian":
            p.add_argument("--xi-window", dest="xi_window", default="0.5:5")
            p.add_argument("--N", default="0.5")
            p.add_argument("--C", default="1")
            p.add_argument("--eps0", default="1")
            p.add_argument("--witnesses", type=int, default=3)
        else:
            p.add_argument("--witness", type=int, default=0)

    for name, const, probe, g in (("ivt", "rho", "10,20,40", "x^(-1.5)*exp(-x)"),
                                  ("fvt", "delta", "0.1,0.05,0.02", "x^(-1.5)*(1-exp(-x))")):
        p = common(sub.add_parser(name, help=f"{'initial' if name == 'ivt' else 'final'} value theorem"))
        p.add_argument("--alpha", default="pi/2")
        p.add_argument("--mu", default="1")
        p.add_argument("--eta", default="2")
        p.add_argument("--g", default=g)
        p.add_argument(f"--{const}", default="1")
        p.add_argument("--probe", default=probe)
        p.add_argument("--bump", default=None, help="order-0 bump on a:b added to g")
        p.add_argument("--tol", type=float, default=0.05)

    p = common(sub.add_parser("seminorm", help="Zemanian seminorm gamma_{m,k}"))
    p.add_argument("--mu", default="0")
    p.add_argument("--fn", default="builtin:gaussian:mu=0")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--k", type=int, default=0)

    p = common(sub.add_parser("svf", help="slowly varying check L(a eps)/L(eps) -> 1"))
    p.add_argument("--L", default="abs(log(x))")
    p.add_argument("--site", choices=["origin", "infinity"], default="origin")
    p.add_argument("--a", default="2/3,3/2")
    p.add_argument("--eps-min", dest="eps_min", type=float, default=1e-6)
    p.add_argument("--tol", type=float, default=0.05)
    return ap


def load_config(path, parser):
    """Validate a config file and turn it into an argparse namespace."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, config_schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(_schema_message(cfg, exc)) from exc
    ns = parser.parse_args([cfg["command"]])
    for k, v in cfg.items():
        setattr(ns, k, v)
    return ns


def _schema_message(cfg, exc):
    # oneOf errors are vague; re-validate against the variant for this command
    if isinstance(cfg, dict) and cfg.get("command") in _OPTIONS:
        variant = config_schema()["oneOf"][list(_OPTIONS).index(cfg["command"])]
        errs = sorted(jsonschema.Draft7Validator(variant).iter_errors(cfg), key=str)
        if errs:
            exc = errs[0]
    where = "/" + "/".join(str(p) for p in exc.absolute_path)
    return f"config error at {where}: {exc.message}"


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    out, err = sys.stdout, sys.stderr
    try:
        if ns.config:
            ns = load_config(ns.config, parser)
        if not ns.command:
            parser.print_usage(err)
            return 2
        report, sweep, summary = HANDLERS[ns.command](ns)
    except (ConfigError, DomainError, ParseError, ValueError) as exc:
        print(f"frht-lab: error: {exc}", file=err)
        return 2
    passed = report.passed if hasattr(report, "passed") else bool(report.get("pass"))
    try:
        if ns.out_csv and sweep is not None:
            emit_csv(ns.out_csv, *sweep)
        if ns.out_json:
            emit_report(report, ns.out_json)
    except OSError as exc:
        print(f"frht-lab: cannot write output: {exc}", file=err)
        return 1
    if not ns.quiet:
        print(f"{ns.command}: {summary}", file=out)
        print(f"{ns.command}: {'PASS' if passed else 'FAIL'}", file=out)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
