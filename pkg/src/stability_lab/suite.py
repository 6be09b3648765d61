"""Seeded randomized invariant suite.

Draws are generated up front from one ``numpy.random.Generator`` and then
evaluated independently, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .asymptotics import rho_tilde
from .cutoff import AlphaParams, CutoffSpec, alpha_of
from .indexform import SLACK_TOL, cm_inequality_report, estimate_report, mpr_rhs
from .metric import DiskGeometry, WarpedMetric, shiohama_tanaka_slack
from .potential import Potential, StabilityParams

DEFAULT_DRAWS = 200
DEFAULT_SEED = 20240601
ALPHA_CAP = 60.0
ST_RMAX = 10.0

# largest admissible outer radius per metric kind
S_CAP = {"euclidean": 400.0, "cone": 400.0, "schoen": 400.0, "hyperbolic": 60.0, "sphere": 3.1}


def default_jobs():
    env = os.environ.get("STABILITY_LAB_JOBS")
    if env:
        return max(1, int(env))
    return 1


@dataclass(frozen=True)
class Draw:
    index: int
    metric: str
    potential: str
    a: float
    b: float
    delta: float
    s: float
    family: str


def _metric_pool():
    return ["euclidean", "hyperbolic:1", "sphere:1", "cone:0.5", "schoen:0.5"]


def _potential(rng):
    kind = rng.integers(3)
    if kind == 0:
        return "zero"
    if kind == 1:
        return f"constant:{float(rng.uniform(0.01, 2.0))!r}"
    return f"decay:{float(rng.uniform(0.1, 2.0))!r},{float(rng.uniform(1.0, 4.0))!r}"


def generate_draws(n=DEFAULT_DRAWS, seed=DEFAULT_SEED):
    """Admissible ``(metric, V, a, b, delta, s)`` draws: alpha > 0 and s > alpha + delta."""
    rng = np.random.default_rng(seed)
    metrics = _metric_pool()
    draws = []
    while len(draws) < n:
        name = metrics[int(rng.integers(len(metrics)))]
        pot = _potential(rng)
        a = float(0.5 - rng.uniform(0.0, 0.5))  # (0, 0.5]
        b = float(rng.uniform(1.0, 3.0))
        delta = float(rng.uniform(0.05, 2.0))
        al = alpha_of(a, b)
        lo = al + delta
        cap = S_CAP[name.split(":")[0]]
        if not (al > 0 and al < ALPHA_CAP and lo * 1.01 < cap):
            continue
        s = float(math.exp(rng.uniform(math.log(lo * 1.01), math.log(cap))))
        family = "log_power" if len(draws) % 2 == 0 else "linear"
        draws.append(Draw(len(draws), name, pot, a, b, delta, s, family))
    return draws


def evaluate_draw(d):
    m = WarpedMetric.parse(d.metric)
    p = StabilityParams(d.a, Potential.parse(d.potential))
    spec = CutoffSpec.log_power(d.s, d.b) if d.family == "log_power" else CutoffSpec.linear(d.s)
    cm = cm_inequality_report(m, p, spec)
    est = estimate_report(m, p, AlphaParams(d.a, d.b, d.delta), d.s)
    return {
        "index": d.index,
        "metric": d.metric,
        "potential": d.potential,
        "a": d.a,
        "b": d.b,
        "delta": d.delta,
        "s": d.s,
        "family": d.family,
        "cm_slack": cm.normalized_slack,
        "estimate_slack": est.normalized_slack,
        "passed": cm.holds() and est.holds(),
    }


def mpr_identity_checks(rng, n=20):
    m = WarpedMetric.euclidean()
    out = []
    for _ in range(n):
        a = float(0.5 - rng.uniform(0.0, 0.5))
        s = float(math.exp(rng.uniform(math.log(0.1), math.log(1e3))))
        err = abs(mpr_rhs(m, a, 1.0, s) - math.pi)
        out.append({"a": a, "s": s, "error": err, "passed": err <= 1e-10})
    return out


def rho_tilde_checks(rng, n=100):
    out = []
    for _ in range(n):
        al = float(rng.uniform(0.1, 5.0))
        k = float(rng.uniform(0.5, 6.0))
        b = float(rng.uniform(1.0, 3.0))
        lim = 1.0 - math.exp(-k * al)
        err0 = abs(rho_tilde(al, b, k, 1e-8) - lim)
        err_inf = abs(rho_tilde(al, b, k, 1e3) - lim) if k > 2 else None
        ok = err0 <= 1e-6 and (err_inf is None or err_inf <= 1e-6)
        out.append({"alpha": al, "k": k, "b": b, "err0": err0, "err_inf": err_inf, "passed": ok})
    return out


def shiohama_tanaka_checks(samples=64):
    out = []
    for name in _metric_pool():
        m = WarpedMetric.parse(name)
        # beyond r ~ 10 on hyperbolic(1) the cancelling terms exceed 1e8 and the
        # absolute tolerance drops below their rounding error
        hi = min(m.r_max * 0.99, ST_RMAX)
        g = DiskGeometry(m)
        worst = min(shiohama_tanaka_slack(g, float(r)) for r in np.linspace(0.05, hi, samples))
        out.append({"metric": name, "worst_slack": worst, "passed": worst >= -1e-8})
    return out


def run_suite(n=DEFAULT_DRAWS, seed=DEFAULT_SEED, jobs=1):
    draws = generate_draws(n, seed)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(evaluate_draw, draws, chunksize=4))
    else:
        records = [evaluate_draw(d) for d in draws]
    rng = np.random.default_rng(seed + 1)
    result = {
        "seed": seed,
        "draws": records,
        "mpr_identity": mpr_identity_checks(rng),
        "rho_tilde": rho_tilde_checks(rng),
        "shiohama_tanaka": shiohama_tanaka_checks(),
        "slack_tol": SLACK_TOL,
    }
    result["passed"] = all(
        r["passed"]
        for key in ("draws", "mpr_identity", "rho_tilde", "shiohama_tanaka")
        for r in result[key]
    )
    return result
