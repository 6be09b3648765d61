"""Index form ``I(f) = int |grad f|^2 - V f^2 + a K f^2`` of radial test
functions, and reports that evaluate both sides of each stability
inequality independently.

For a radial ``f`` on a rotational metric the co-area formula reduces the
index form to

    I(f) = int (f'^2 - V f^2 + a K f^2) l(r) dr,   l = 2 pi tau,

and ``K l = -2 pi tau''`` avoids dividing by ``tau`` near the pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import rho_plus
from .cutoff import (
    AlphaParams,
    CutoffSpec,
    F_weighted,
    G_term,
    f_minus_at_epsilon,
)
from .metric import (
    CHI_DISK,
    TWO_PI,
    StepProfile,
    boundary_length,
    curvature_integral,
    disk_area,
    kmin_profile,
)
from .errors import PreconditionError
from .potential import Potential, StabilityParams
from .quadrature import quad

__all__ = [
    "InequalityReport",
    "Potential",
    "StabilityParams",
    "cm_inequality_report",
    "estimate_report",
    "huber_critical_M",
    "huber_report",
    "index_form",
    "mpr_inequality",
    "t3_functional",
]

SLACK_TOL = 1e-8


@dataclass
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    terms: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def normalized_slack(self):
        return self.slack / max(1.0, abs(self.rhs))

    def holds(self, tol=SLACK_TOL):
        return self.normalized_slack >= -tol

    def to_record(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "normalized_slack": self.normalized_slack,
            "terms": dict(self.terms),
            "params": dict(self.params),
            "flags": dict(self.flags),
        }


def _check_support(m, s):
    if s > m.r_max:
        raise ValueError(f"disk D({s}) leaves the domain of {m.name} (r_max={m.r_max})")


def _require_a(a):
    if not a > 0:
        raise PreconditionError(f"a > 0 required, got a={a!r}")


def _flat(m):
    return m.kind == "euclidean" or m.kind == "cone"


def index_form(m, p, spec):
    _check_support(m, spec.s)
    a = p.a
    V = p.V

    def integrand(r):
        f, df, _ = spec.derivatives(r)
        tau = m.tau(r)
        # (df * tau) * df keeps the product finite where f' ~ 1/r is huge
        return TWO_PI * ((df * tau) * df - (V(r) * f * f) * tau - a * f * f * m.d2tau_eval(r))

    start = max(m.r_min, spec.support_start)
    return quad(integrand, start, spec.s, points=spec.breakpoints)


def potential_term(m, V, spec):
    """``int_{D(s)} V f^2``."""
    if V.is_zero:
        return 0.0
    start = max(m.r_min, spec.support_start)
    return TWO_PI * quad(lambda r: V(r) * spec.f(r) ** 2 * m.tau(r), start, spec.s,
                         points=spec.breakpoints)


def F_integral(m, a, spec):
    """``int_eps^s F(r) l(r) dr`` using the closed form of ``F``."""
    eps = max(spec.epsilon, m.r_min)
    return TWO_PI * quad(lambda r: F_weighted(spec, a, r, m.tau(r)), eps, spec.s,
                         points=spec.breakpoints)


def cm_inequality_report(m, p, spec, chi_profile=CHI_DISK):
    """Both sides of the plateau-cutoff bound on the index form."""
    if spec.family == "huber":
        raise ValueError("the plateau inequality needs a linear, power or log_power cutoff")
    _check_support(m, spec.s)
    a = p.a
    _require_a(a)
    lhs = index_form(m, p, spec)
    G = G_term(spec, chi_profile, spec.s)
    eps = max(spec.epsilon, m.r_min)
    fm = f_minus_at_epsilon(spec)
    l_eps = boundary_length(m, eps)
    pot = potential_term(m, p.V, spec)
    fint = F_integral(m, a, spec)
    rhs = 2.0 * a * (math.pi * G - fm * l_eps) - pot + fint
    return InequalityReport(
        "cm",
        lhs,
        rhs,
        terms={"G": G, "f_minus_eps": fm, "l_eps": l_eps, "potential": pot, "F_integral": fint},
        params={"metric": m.name, "potential": p.V.name, "a": a, "family": spec.family,
                "s": spec.s, "b": spec.b, "chi": repr(chi_profile)},
        flags={"K_identically_zero": _flat(m)},
    )


def estimate_report(m, p, params, s, chi_profile=CHI_DISK):
    """Both sides of the log-power estimate with the ``rho+`` error term."""
    if params.a != p.a:
        raise ValueError("AlphaParams.a must equal StabilityParams.a")
    params.check(s)
    _check_support(m, s)
    a, b = p.a, params.b
    spec = CutoffSpec.log_power(s, b)
    lhs = index_form(m, p, spec)

    G = G_term(spec, chi_profile, s)
    eps = s * math.exp(-s)
    kmin = kmin_profile(m, max(eps, m.r_min))
    rho = rho_plus(m, a, b, params.delta, s)
    V = p.V
    if V.is_zero:
        pot_inner = pot_outer = 0.0
    else:
        pot_inner = TWO_PI * quad(lambda r: V(r) * m.tau(r), m.r_min, eps)
        pot_outer = TWO_PI * quad(lambda r: (np.log(s / r) / s) ** (2.0 * b) * V(r) * m.tau(r),
                                  max(eps, m.r_min), s)
    boundary = 2.0 * a * (G * math.pi + b * (TWO_PI - kmin) / s)
    rhs = boundary + rho - (pot_inner + pot_outer)
    return InequalityReport(
        "estimate",
        lhs,
        rhs,
        terms={"G": G, "kmin": kmin, "boundary_term": boundary, "rho_plus": rho,
               "potential_inner": pot_inner, "potential_outer": pot_outer},
        params={"metric": m.name, "potential": V.name, "a": a, "b": b,
                "alpha": params.alpha, "delta": params.delta, "s": s},
        flags={"K_identically_zero": _flat(m)},
    )


def mpr_rhs(m, a, b, s):
    """``2 a pi + b(b(1-4a)+2a)/s^2 int_0^s (1-r/s)^(2b-2) l``."""
    w = quad(lambda r: (1.0 - r / s) ** (2.0 * b - 2.0) * m.tau(r), m.r_min, s)
    return 2.0 * a * math.pi + b * (b * (1.0 - 4.0 * a) + 2.0 * a) / s**2 * TWO_PI * w


def mpr_inequality(m, p, b, s, stable=None):
    """Weighted potential bound from the power cutoff ``(1 - r/s)^b``.

    ``stable`` is the nonpositivity hypothesis: ``None`` certifies it through
    the first Dirichlet eigenvalue on ``D(s)``; ``True`` assumes it.
    """
    if not b >= 1:
        raise PreconditionError(f"b >= 1 required, got b={b!r}")
    _check_support(m, s)
    a = p.a
    _require_a(a)
    V = p.V
    if V.is_zero:
        lhs = 0.0
    else:
        lhs = TWO_PI * quad(lambda r: (1.0 - r / s) ** (2.0 * b) * V(r) * m.tau(r), m.r_min, s)
    rhs = mpr_rhs(m, a, b, s)
    flags = {}
    if stable is None:
        from .spectral import lambda1

        lam = lambda1(m, p, s)
        flags["lambda1"] = lam
        flags["stable"] = lam >= 0.0
        flags["stability"] = "certified"
    else:
        flags["stable"] = bool(stable)
        flags["stability"] = "assumed"
    return InequalityReport(
        "mpr", lhs, rhs, terms={},
        params={"metric": m.name, "potential": V.name, "a": a, "b": b, "s": s},
        flags=flags,
    )


def huber_report(m, p, s0, s1, s2, s, chi_profile=CHI_DISK):
    """Value of the finite-topology bound; stability forces it to be ``>= 0``."""
    spec = CutoffSpec.huber(s0, s1, s2, s)
    _check_support(m, s)
    a = p.a
    _require_a(a)

    def ring(r):
        f0 = r - s1 + 1.0
        return TWO_PI * (m.tau(r) - a * f0 * f0 * m.d2tau_eval(r))

    c_a = -a * curvature_integral(m, s1) + quad(ring, s1 - 1.0, s1)
    G = G_term(spec, chi_profile, s)
    l2 = boundary_length(m, s2)
    tail = TWO_PI * quad(m.tau, s2, s)
    rhs = (c_a + 2.0 * math.pi * a * G + 2.0 * a * l2 / (s - s2)
           + (1.0 - 2.0 * a) / (s - s2) ** 2 * tail)
    return InequalityReport(
        "huber", 0.0, rhs,
        terms={"c_a": c_a, "G": G, "l_s2": l2, "tail_area": tail},
        params={"metric": m.name, "a": a, "s0": s0, "s1": s1, "s2": s2, "s": s,
                "chi": repr(chi_profile)},
    )


def huber_critical_M(m, p, s0, s1, s2, s, M_cap=10**6):
    """Smallest integer ``M`` with ``chi = -M`` beyond ``s2`` making the bound negative.

    Located by bisection over integers; ``None`` when even ``M_cap`` keeps it
    nonnegative.
    """

    def negative(M):
        chi = StepProfile((s2,), (1, -M))
        return huber_report(m, p, s0, s1, s2, s, chi).rhs < 0.0

    if negative(0):
        return 0
    lo, hi = 0, 1
    while not negative(hi):
        lo, hi = hi, 2 * hi
        if hi > M_cap:
            return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if negative(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class T3Result:
    s: np.ndarray
    T: np.ndarray
    limit_estimate: float


def t3_functional(m, a, M, s0, s):
    """``T(s) = 2a(1 - (M+1)(1 - s0/s)^2) + (1-2a) a(s)/s^2`` on a grid.

    The limit estimate ``-M + (1-2a) a(s)/s^2`` is taken at the largest ``s``.
    """
    _require_a(a)
    grid = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(grid < s0) or not s0 > 0:
        raise ValueError("t3 functional needs s >= s0 > 0")
    areas = np.array([disk_area(m, x) for x in grid])
    T = 2.0 * a * (1.0 - (M + 1.0) * (1.0 - s0 / grid) ** 2) + (1.0 - 2.0 * a) * areas / grid**2
    top = int(np.argmax(grid))
    limit = -M + (1.0 - 2.0 * a) * areas[top] / grid[top] ** 2
    return T3Result(grid, T, float(limit))
