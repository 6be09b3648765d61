"""Command line scenario runner.

Every subcommand reads an optional JSON config (``--config``), lets flags
override it, writes a JSON or CSV artifact and prints one verdict line per
check.  Exit codes: 0 all checks passed, 1 a numerical check failed,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, indexform, metric, spectral, suite
from .cutoff import AlphaParams, CutoffSpec, alpha_of
from .errors import FitUndefinedError, PreconditionError, StabilityLabError
from .metric import DiskGeometry, StepProfile, WarpedMetric
from .potential import Potential, StabilityParams

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    """Invalid configuration; maps to exit code 2."""


# formatting -------------------------------------------------------------------------


def fmt_float(x):
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return "%.17g" % x


def to_json(obj, indent=0):
    """JSON text with every float written to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + to_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(v)


def to_csv(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(csv_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


# parsing helpers ----------------------------------------------------------------------


def parse_grid(text):
    """``lo:hi:logxN`` (geometric), ``lo:hi:linN`` (linear) or ``x1,x2,...``."""
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"s_grid {text!r}: expected lo:hi:logxN or lo:hi:linN")
        lo, hi, kind = float(parts[0]), float(parts[1]), parts[2]
        if kind.startswith("logx"):
            n = int(kind[4:])
            if not (lo > 0 and hi > lo and n >= 2):
                raise ConfigError(f"s_grid {text!r}: need 0 < lo < hi and N >= 2")
            return [float(x) for x in np.geomspace(lo, hi, n)]
        if kind.startswith("lin"):
            n = int(kind[3:])
            if not (hi > lo and n >= 2):
                raise ConfigError(f"s_grid {text!r}: need lo < hi and N >= 2")
            return [float(x) for x in np.linspace(lo, hi, n)]
        raise ConfigError(f"s_grid {text!r}: unknown spacing {kind!r}")
    return [float(x) for x in text.split(",") if x.strip()]


def parse_pair(text, name):
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return float(text[0]), float(text[1])
    try:
        lo, hi = (float(x) for x in str(text).split(":"))
    except ValueError as exc:
        raise ConfigError(f"{name} {text!r}: expected lo:hi") from exc
    return lo, hi


def parse_chi(text):
    """``R:M`` is the step profile equal to 1 up to ``R`` and ``-M`` beyond."""
    if text is None:
        return metric.CHI_DISK
    try:
        r, M = str(text).split(":")
        return StepProfile((float(r),), (1, -int(M)))
    except ValueError as exc:
        raise ConfigError(f"chi {text!r}: expected R:M") from exc


# config -------------------------------------------------------------------------------

DEFAULTS = {
    "metric": "euclidean",
    "potential": "zero",
    "a": 0.25,
    "b": 1.0,
    "delta": 1.0,
    "format": "json",
    "rmax": 40.0,
    "tol": 1e-3,
    "seed": suite.DEFAULT_SEED,
    "draws": suite.DEFAULT_DRAWS,
    "family": "linear",
}


def load_config(args):
    cfg = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {str(path)!r} not found")
        try:
            cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {str(path)!r} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "func"):
            cfg[key] = value
    for key, value in DEFAULTS.items():
        cfg.setdefault(key, value)
    return cfg


def _num(cfg, key, cond=None, why=""):
    try:
        x = float(cfg[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"field {key!r} must be a number") from exc
    if cond is not None and not cond(x):
        raise ConfigError(f"field {key!r}={x!r}: {why}")
    return x


def build_metric(cfg):
    try:
        return WarpedMetric.parse(cfg["metric"])
    except (ValueError, FileNotFoundError) as exc:
        raise ConfigError(f"field 'metric': {exc}") from exc


def build_params(cfg, allow_zero_a=False):
    cond = (lambda x: x >= 0) if allow_zero_a else (lambda x: x > 0)
    a = _num(cfg, "a", cond, "a >= 0 required" if allow_zero_a else "a > 0 required by L = Delta + V - aK")
    try:
        V = Potential.parse(cfg["potential"])
    except (ValueError, FileNotFoundError) as exc:
        raise ConfigError(f"field 'potential': {exc}") from exc
    c = cfg.get("c")
    if c is None and V.kind == "constant":
        c = V.params[0]
    if c is not None:
        c = _num({"c": c}, "c", lambda x: x > 0, "c > 0 required")
    p = StabilityParams(a, V, c)
    return p


def s_values(cfg):
    if cfg.get("s_grid") is not None:
        grid = parse_grid(cfg["s_grid"])
    elif cfg.get("s") is not None:
        grid = parse_grid(cfg["s"])
    else:
        raise ConfigError("field 's' or 's_grid' is required")
    if not grid or any(not x > 0 for x in grid):
        raise ConfigError("radii in 's'/'s_grid' must be positive")
    return grid


def check_domain(m, grid, name="s"):
    for s in grid:
        if s > m.r_max:
            raise ConfigError(f"field {name!r}={s!r} exceeds r_max={m.r_max} of {m.name}")


# output -------------------------------------------------------------------------------


class Run:
    def __init__(self, command, cfg):
        self.command = command
        self.cfg = cfg
        self.checks = []

    def check(self, name, ok, detail=""):
        self.checks.append({"check": name, "passed": bool(ok), "detail": detail})
        print(f"{'PASS' if ok else 'FAIL'} {self.command} {name}" + (f" {detail}" if detail else ""))

    def info(self, text):
        print(f"INFO {self.command} {text}")

    def emit(self, payload, header=None, rows=None):
        fmt = self.cfg.get("format", "json")
        out = self.cfg.get("output")
        if fmt == "csv":
            if header is None:
                raise ConfigError(f"command {self.command!r} has no CSV export")
            text = to_csv(header, rows)
        elif fmt == "json":
            doc = {"schema_version": SCHEMA_VERSION, "command": self.command}
            doc.update(payload)
            doc["checks"] = self.checks
            text = to_json(doc) + "\n"
        else:
            raise ConfigError(f"field 'format' must be json or csv, got {fmt!r}")
        if out:
            Path(out).parent.mkdir(parents=True, exist_ok=True)
            with open(out, "w", newline="\n") as fh:
                fh.write(text)

    @property
    def code(self):
        return EXIT_OK if all(c["passed"] for c in self.checks) else EXIT_FAIL


# commands -----------------------------------------------------------------------------


def cmd_geometry(cfg):
    run = Run("geometry", cfg)
    m = build_metric(cfg)
    grid = s_values(cfg)
    check_domain(m, grid)
    g = DiskGeometry(m)
    rows = []
    for s in grid:
        interior = m.r_min < s < m.r_max
        K = metric.curvature(m, s) if interior else None
        total = metric.curvature_integral(m, s)
        st = metric.shiohama_tanaka_slack(g, s) if interior else None
        rows.append([s, float(m.tau(np.array([s]))[0]), K, metric.boundary_length(m, s),
                     metric.disk_area(m, s), total, st])
    sts = [r[6] for r in rows if r[6] is not None]
    if sts:
        run.check("shiohama-tanaka", min(sts) >= -1e-8, f"min_slack={min(sts):.3e}")
    if m.smooth_origin and m.is_registry:
        err = max(abs(r[5] - metric.TWO_PI * (1.0 - float(m.dtau_eval(np.array([r[0]]))[0])))
                  for r in rows)
        run.check("gauss-bonnet", err <= 1e-8, f"max_err={err:.3e}")
    header = ["s", "tau", "curvature", "length", "area", "total_curvature", "st_slack"]
    run.emit({"metric": m.name, "rows": [dict(zip(header, r)) for r in rows]}, header, rows)
    return run.code


def cmd_inequality(cfg):
    kind = cfg["kind"]
    run = Run(f"inequality-{kind}", cfg)
    m = build_metric(cfg)
    p = build_params(cfg)
    a = p.a
    if kind == "t3":
        M = _num(cfg, "M", lambda x: x >= 0, "M >= 0 required")
        s0 = _num(cfg, "s0", lambda x: x > 0, "s0 > 0 required")
        grid = s_values(cfg)
        check_domain(m, grid)
        if min(grid) < s0:
            raise ConfigError("field 's_grid': every s must satisfy s >= s0")
        res = indexform.t3_functional(m, a, M, s0, grid)
        run.info(f"limit_estimate={res.limit_estimate:.17g}")
        rows = [[s, T] for s, T in zip(res.s, res.T)]
        run.emit({"metric": m.name, "a": a, "M": M, "s0": s0, "s": res.s, "T": res.T,
                  "limit_estimate": res.limit_estimate}, ["s", "T"], rows)
        return run.code

    grid = s_values(cfg)
    check_domain(m, grid)
    b = _num(cfg, "b", lambda x: x >= 1, "b >= 1 required")
    reports = []
    for s in grid:
        if kind == "cm":
            fam = cfg["family"]
            if fam == "linear":
                spec = CutoffSpec.linear(s)
            elif fam == "power":
                spec = CutoffSpec.power(s, b)
            elif fam == "log_power":
                spec = CutoffSpec.log_power(s, b)
            else:
                raise ConfigError(f"field 'family' must be linear, power or log_power, got {fam!r}")
            rep = indexform.cm_inequality_report(m, p, spec, parse_chi(cfg.get("chi")))
            run.check(f"s={s:.17g}", rep.holds(), f"slack={rep.slack:.17g}")
        elif kind == "estimate":
            delta = _num(cfg, "delta", lambda x: x > 0, "delta > 0 required")
            al = alpha_of(a, b)
            if not al > 0:
                raise ConfigError(f"alpha = {al!r}: alpha > 0 required by the log-power estimate")
            if not s > al + delta:
                raise ConfigError(f"field 's'={s!r}: s > alpha + delta = {al + delta!r} required")
            rep = indexform.estimate_report(m, p, AlphaParams(a, b, delta), s)
            run.check(f"s={s:.17g}", rep.holds(), f"slack={rep.slack:.17g}")
        elif kind == "mpr":
            stable = True if cfg.get("assume_stable") else None
            rep = indexform.mpr_inequality(m, p, b, s, stable=stable)
            if rep.flags["stable"]:
                run.check(f"s={s:.17g}", rep.holds(),
                          f"slack={rep.slack:.17g} stability={rep.flags['stability']}")
            else:
                run.info(f"s={s:.17g} slack={rep.slack:.17g} hypothesis not met "
                         f"(lambda1={rep.flags['lambda1']:.6g})")
        elif kind == "huber":
            s0 = _num(cfg, "s0", None)
            s1 = _num(cfg, "s1", None)
            s2 = _num(cfg, "s2", None)
            if not (s0 < s1 - 1 < s1 < s2 < s):
                raise ConfigError("fields s0, s1, s2, s must satisfy s0 < s1 - 1 < s1 < s2 < s")
            rep = indexform.huber_report(m, p, s0, s1, s2, s, parse_chi(cfg.get("chi")))
            run.check(f"s={s:.17g}", rep.holds(), f"value={rep.rhs:.17g}")
            if cfg.get("critical_M"):
                Mc = indexform.huber_critical_M(m, p, s0, s1, s2, s)
                rep.terms["critical_M"] = Mc
                run.info(f"s={s:.17g} critical_M={Mc}")
        else:
            raise ConfigError(f"unknown inequality {kind!r}")
        reports.append(rep)
    rows = [[r.params.get("s", s), r.lhs, r.rhs, r.slack] for r, s in zip(reports, grid)]
    run.emit({"reports": [r.to_record() for r in reports]}, ["s", "lhs", "rhs", "slack"], rows)
    return run.code


def cmd_rho(cfg):
    run = Run("rho", cfg)
    m = build_metric(cfg)
    a = _num(cfg, "a", lambda x: x > 0, "a > 0 required")
    b = _num(cfg, "b", lambda x: x >= 1, "b >= 1 required")
    delta = _num(cfg, "delta", lambda x: x > 0, "delta > 0 required")
    al = alpha_of(a, b)
    if not al > 0:
        raise ConfigError(f"alpha = {al!r}: alpha > 0 required by the log-power estimate")
    grid = s_values(cfg)
    check_domain(m, grid)
    if min(grid) <= al + delta:
        raise ConfigError(f"field 's_grid': s > alpha + delta = {al + delta!r} required")
    rho = asymptotics.rho_plus_curve(m, a, b, delta, grid)
    payload = {"metric": m.name, "a": a, "b": b, "alpha": al, "delta": delta}
    ratio = [None] * len(grid)
    try:
        k, C = asymptotics.growth_constants(m, (min(grid), max(grid)) if max(grid) >= 10 * min(grid) else None)
    except (FitUndefinedError, PreconditionError):
        k = C = None
    if k is not None:
        ratio = list(asymptotics.asymptotic_ratio(m, a, b, delta, grid, k, C))
        res = asymptotics.rho_asymptotics(a, b, k, C)
        payload["asymptotics"] = {
            "k": k, "C": C, "C_plus": res.C_plus, "delta0": res.delta0,
            "rho_min": res.rho_min, "boundary_flag": res.boundary_flag,
        }
        if max(grid) >= 1e3:
            dev = abs(ratio[-1] - 1.0)
            run.check("ratio-limit", dev <= 0.02, f"ratio={ratio[-1]:.17g}")
    else:
        run.info("no area growth constants; ratio column omitted")
    if cfg.get("delta_scan"):
        lo, hi = parse_pair(cfg["delta_scan"], "delta_scan")
        if k is None:
            raise ConfigError("delta scan needs area growth constants (k, C)")
        ds = np.geomspace(lo, hi, 64)
        payload["delta_scan"] = [{"delta": d, "rho_tilde": asymptotics.rho_tilde(al, b, k, d)} for d in ds]
    payload["rows"] = [{"s": s, "rho_plus": r, "ratio": q} for s, r, q in zip(grid, rho, ratio)]
    rows = [[s, r, q] for s, r, q in zip(grid, rho, ratio)]
    run.emit(payload, ["s", "rho_plus", "ratio"], rows)
    return run.code


def cmd_a0(cfg):
    run = Run("a0", cfg)
    m = build_metric(cfg)
    R = _num(cfg, "rmax", lambda x: x > 0, "rmax > 0 required")
    tol = _num(cfg, "tol", lambda x: x > 0, "tol > 0 required")
    check_domain(m, [R], "rmax")
    res = spectral.estimate_a0(m, R, tol, tail_test=not cfg.get("no_tail_test"))
    if res.unbounded:
        run.info(f"feasible up to the scan cap a={res.a0_low:.17g} (a0 unbounded)")
    else:
        run.info(f"a0 in [{res.a0_low:.17g}, {res.a0_high:.17g}] method={res.method}")
        run.check("bracket-width", res.width <= tol, f"width={res.width:.3e}")
    if res.convergence_gap is not None:
        run.info(f"a0_high(2R)={res.a0_high_2R:.17g} gap={res.convergence_gap:.3e}")
    if cfg.get("a_grid") is not None:
        a_vals = parse_grid(cfg["a_grid"])
        zeros = spectral.a_scan(m, R, a_vals)
        rows = [[a, z] for a, z in zip(a_vals, zeros)]
        run.emit({"metric": m.name, "result": res.to_dict(),
                  "scan": [{"a": a, "first_zero": z} for a, z in rows]},
                 ["a", "first_zero"], rows)
    else:
        run.emit({"metric": m.name, "result": res.to_dict()}, ["a", "first_zero"],
                 [[res.a0_high, res.first_zero]])
    return run.code


def cmd_lambda1(cfg):
    run = Run("lambda1", cfg)
    m = build_metric(cfg)
    p = build_params(cfg, allow_zero_a=True)
    grid = sorted(s_values(cfg))
    check_domain(m, grid)
    curve = spectral.lambda1_curve(m, p, grid)
    lams = [lam for _, lam in curve]
    mono = all(l2 <= l1 + 1e-9 * max(1.0, abs(l1)) for l1, l2 in zip(lams, lams[1:]))
    run.check("domain-monotonicity", mono)
    for s, lam in curve:
        run.info(f"s={s:.17g} lambda1={lam:.17g}")
    run.emit({"metric": m.name, "a": p.a, "potential": p.V.name,
              "curve": [{"s": s, "lambda1": lam} for s, lam in curve]},
             ["s", "lambda1"], [list(x) for x in curve])
    return run.code


def cmd_distance(cfg):
    run = Run("distance", cfg)
    m = build_metric(cfg)
    p = build_params(cfg)
    if p.c_lower is None:
        raise ConfigError("field 'c' (V >= c > 0) is required for the distance bound")
    p.certify(m.r_min, min(m.r_max, 1e4))
    b = cfg.get("b_distance")
    scan = parse_pair(cfg.get("s_scan", "0.5:10000"), "s_scan")
    res = spectral.distance_bound(m, p, None if b is None else float(b), scan)
    if res.found:
        run.info(f"s_star={res.s_star:.17g} method={res.method}")
    else:
        run.info(f"no bound found up to s={res.s_cap:.17g} method={res.method}")
    run.emit({"metric": m.name, "result": res.to_dict()}, ["s", "slack"], [list(x) for x in res.scan])
    return run.code


def cmd_potential_growth(cfg):
    run = Run("potential-growth", cfg)
    m = build_metric(cfg)
    p = build_params(cfg)
    b = _num(cfg, "b", lambda x: x >= 1, "b >= 1 required")
    grid = sorted(s_values(cfg))
    check_domain(m, grid)
    rep = spectral.potential_growth_check(m, p, b, grid)
    if not rep.hypothesis_ok:
        run.info("hypothesis-failed: lambda1 < 0 on some disk")
    run.info(f"sup_ratio={rep.sup_ratio:.17g}")
    rows = [[s, v, r, lam] for s, v, r, lam in zip(rep.s, rep.integral, rep.ratio, rep.lambda1)]
    run.emit({"metric": m.name, "report": rep.to_dict()}, ["s", "integral", "ratio", "lambda1"], rows)
    return run.code


def cmd_curvature_report(cfg):
    run = Run("curvature-report", cfg)
    m = build_metric(cfg)
    R = _num(cfg, "rmax", lambda x: x > 0, "rmax > 0 required")
    check_domain(m, [R], "rmax")
    rep = spectral.curvature_integrability_report(m, R)
    run.info(f"K_plus={rep.K_plus:.17g} K_minus={rep.K_minus:.17g} total={rep.total:.17g}")
    run.info(f"0 <= total <= 2 pi chi: {rep.total_in_range}; quadratic growth: {rep.quadratic_growth}")
    run.emit({"metric": m.name, "report": rep.to_dict()})
    return run.code


def cmd_suite(cfg):
    run = Run("suite", cfg)
    seed = int(cfg["seed"])
    n = int(cfg["draws"])
    jobs = int(cfg.get("jobs") or suite.default_jobs())
    if n < 1 or jobs < 1:
        raise ConfigError("fields 'draws' and 'jobs' must be positive")
    res = suite.run_suite(n, seed, jobs)
    worst_cm = min(d["cm_slack"] for d in res["draws"])
    worst_est = min(d["estimate_slack"] for d in res["draws"])
    run.check("cm-slack", all(d["cm_slack"] >= -indexform.SLACK_TOL for d in res["draws"]),
              f"worst={worst_cm:.3e}")
    run.check("estimate-slack",
              all(d["estimate_slack"] >= -indexform.SLACK_TOL for d in res["draws"]),
              f"worst={worst_est:.3e}")
    for key in ("mpr_identity", "rho_tilde", "shiohama_tanaka"):
        run.check(key.replace("_", "-"), all(r["passed"] for r in res[key]))
    header = ["index", "metric", "potential", "a", "b", "delta", "s", "family",
              "cm_slack", "estimate_slack", "passed"]
    rows = [[d[h] for h in header] for d in res["draws"]]
    run.emit(res, header, rows)
    return run.code


# argument parser ------------------------------------------------------------------------


def _common(sp):
    sp.add_argument("--config", help="JSON config file; flags override its fields")
    sp.add_argument("--metric", help="euclidean | hyperbolic:k | sphere:k | cone:beta | schoen:eps | custom:path.csv")
    sp.add_argument("--output", "-o", help="artifact path (stdout verdicts only when omitted)")
    sp.add_argument("--format", choices=("json", "csv"))


def _operator(sp):
    sp.add_argument("--potential", help="zero | constant:c | decay:c,p | custom:path.csv")
    sp.add_argument("--a", type=float)
    sp.add_argument("--c", type=float, help="certified lower bound V >= c")


def _radii(sp):
    sp.add_argument("--s", help="radius or comma list")
    sp.add_argument("--s-grid", dest="s_grid", help="lo:hi:logxN, lo:hi:linN or comma list")


def build_parser():
    ap = argparse.ArgumentParser(prog="stability-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("geometry", help="disk geometry curves")
    _common(sp)
    _radii(sp)
    sp.set_defaults(func=cmd_geometry)

    sp = sub.add_parser("inequality", help="inequality reports over radii")
    sp.add_argument("kind", choices=("cm", "estimate", "mpr", "huber", "t3"))
    _common(sp)
    _operator(sp)
    _radii(sp)
    sp.add_argument("--b", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--family", choices=("linear", "power", "log_power"))
    sp.add_argument("--chi", help="step Euler characteristic R:M (1 up to R, -M beyond)")
    sp.add_argument("--assume-stable", dest="assume_stable", action="store_true", default=None)
    sp.add_argument("--s0", type=float)
    sp.add_argument("--s1", type=float)
    sp.add_argument("--s2", type=float)
    sp.add_argument("--M", type=float)
    sp.add_argument("--critical-M", dest="critical_M", action="store_true", default=None)
    sp.set_defaults(func=cmd_inequality)

    sp = sub.add_parser("rho", help="rho+ curves, asymptotic ratios and delta scans")
    _common(sp)
    _radii(sp)
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--delta-scan", dest="delta_scan", help="lo:hi")
    sp.set_defaults(func=cmd_rho)

    sp = sub.add_parser("a0", help="critical constant bracket by shooting")
    _common(sp)
    sp.add_argument("--rmax", type=float)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--no-tail-test", dest="no_tail_test", action="store_true", default=None)
    sp.add_argument("--a-grid", dest="a_grid", help="export first-zero radii over an a grid")
    sp.set_defaults(func=cmd_a0)

    sp = sub.add_parser("lambda1", help="first Dirichlet eigenvalues")
    _common(sp)
    _operator(sp)
    _radii(sp)
    sp.set_defaults(func=cmd_lambda1)

    sp = sub.add_parser("distance", help="inradius bound for V >= c > 0")
    _common(sp)
    _operator(sp)
    sp.add_argument("--b", dest="b_distance", type=float)
    sp.add_argument("--s-scan", dest="s_scan", help="lo:hi")
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("potential-growth", help="growth of the potential integral")
    _common(sp)
    _operator(sp)
    _radii(sp)
    sp.add_argument("--b", type=float)
    sp.set_defaults(func=cmd_potential_growth)

    sp = sub.add_parser("curvature-report", help="positive and negative total curvature")
    _common(sp)
    sp.add_argument("--rmax", type=float)
    sp.set_defaults(func=cmd_curvature_report)

    sp = sub.add_parser("suite", help="seeded randomized invariant suite")
    _common(sp)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--draws", type=int)
    sp.add_argument("--jobs", type=int, help="worker processes (default $STABILITY_LAB_JOBS or 1)")
    sp.set_defaults(func=cmd_suite)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args)
        return args.func(cfg)
    except (ConfigError, PreconditionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StabilityLabError as exc:
        print(f"FAIL {args.command} {type(exc).__name__}: {exc}")
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
