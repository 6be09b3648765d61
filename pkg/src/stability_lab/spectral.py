"""Radial spectral questions for ``L = Delta + V - a K``.

Everything reduces to the initial value problem

    u'' + (tau'/tau) u' + (V - a K + lam) u = 0,   u'(origin) = 0,

whose first zero decides nonpositivity of ``L`` on disks (no zero up to
``R`` iff ``lambda_1(D(s)) >= 0`` for every ``s <= R``) and, with ``lam``
free, gives the first Dirichlet eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .asymptotics import delta0_minimizer, growth_constants, rho_plus
from .cutoff import AlphaParams, alpha_of
from .errors import (
    DegenerateMetricError,
    DomainError,
    FitUndefinedError,
    IntegrationError,
    PreconditionError,
)
from .indexform import mpr_rhs
from .metric import TWO_PI, disk_area, kmin_profile
from .potential import Potential, StabilityParams
from .quadrature import quad

ORIGIN_START = 1e-6
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12
ZERO_TOL = 1e-10
MAX_STEPS = 2_000_000
KNESER_LIMIT = 0.25
A_CAP = 1.0
FD_NODES = 2000


# shooting ---------------------------------------------------------------------


def _kernel_inputs(m, p):
    mcode, mpar, mx, mc = m.kernel_args()
    vcode, vpar, vx, vc = p.V.kernel_args()
    return mcode, mpar, mx, mc, vcode, vpar, vx, vc


def _end_radius(m, R):
    R = float(R)
    if not R > m.r_min:
        raise DomainError(f"radius {R!r} must exceed r_min={m.r_min}")
    if R > m.r_max:
        raise DomainError(f"radius {R!r} beyond r_max={m.r_max} of {m.name}")
    if R == m.r_max:
        # tau vanishes at the far pole; stop just short of it
        R = m.r_max * (1.0 - 1e-9)
    return R


def _initial_data(m, args, a, lam):
    if m.smooth_origin:
        h = ORIGIN_START
        _, _, q0 = kernels.coefficients(*args, a, h)
        c = q0 + lam
        # second-order Taylor step: the radial Laplacian is 2u''(0) at the pole
        return h, 1.0 - c * h * h / 4.0, -c * h / 2.0
    return max(m.r_min, ORIGIN_START), 1.0, 0.0


def first_zero(m, p, R, lam=0.0):
    """First zero of the regular radial solution on ``(r_start, R]``, or ``None``."""
    R = _end_radius(m, R)
    args = _kernel_inputs(m, p)
    r0, u0, du0 = _initial_data(m, args, p.a, lam)
    status, rz, rlast, _ = kernels.shoot(
        *args, p.a, float(lam), r0, u0, du0, R, ODE_RTOL, ODE_ATOL, ZERO_TOL, MAX_STEPS
    )
    if status == kernels.SHOOT_ZERO:
        return float(rz)
    if status == kernels.SHOOT_OK:
        return None
    if status == kernels.SHOOT_DEGENERATE:
        raise DegenerateMetricError(f"tau degenerate near r={rlast!r} on {m.name}")
    raise IntegrationError(
        f"step size underflow while shooting on {m.name}", last_radius=float(rlast)
    )


def shoot_positive_solution(m, p, R_max):
    """Radius of the first zero of the shooting solution (``None`` if positive)."""
    return first_zero(m, p, R_max, 0.0)


def tail_index(m, p, R):
    """``R^2 Q(R)`` for the Liouville normal form ``w'' + Q w = 0``.

    With ``u = w exp(-int p/2)`` one gets ``Q = q + p^2/4 - (tau''/tau)/2``;
    Kneser's criterion makes every solution oscillate once ``r^2 Q`` stays
    above ``1/4``.
    """
    args = _kernel_inputs(m, p)
    _, pr, q = kernels.coefficients(*args, p.a, float(R))
    _, _, d2 = kernels.metric_ratios(args[0], args[1], args[2], args[3], float(R))
    return R * R * (q + 0.25 * pr * pr - 0.5 * d2)


def feasible(m, p, R_max, tail_test=True):
    """Whether the truncated problem admits a positive solution on ``D(R_max)``.

    On unbounded domains ``tail_test`` additionally rejects operators whose
    tail at ``R_max`` is already in the oscillatory Kneser regime.
    """
    if shoot_positive_solution(m, p, R_max) is not None:
        return False
    if tail_test and math.isinf(m.r_max):
        return tail_index(m, p, R_max) <= KNESER_LIMIT + 1e-12
    return True


# a0 -------------------------------------------------------------------------------


@dataclass
class SpectralResult:
    a0_low: float
    a0_high: float
    first_zero: float | None
    R_max: float
    tol: float
    lambda1_curve: list = field(default_factory=list)
    method: str = "bisection"
    unbounded: bool = False
    tail_test: bool = True
    a0_high_2R: float | None = None
    convergence_gap: float | None = None

    @property
    def width(self):
        return self.a0_high - self.a0_low

    def to_dict(self):
        return asdict(self)


def curvature_sign(m, R_max, samples=2048):
    """``'nonpositive'``, ``'nonnegative'`` or ``'mixed'`` on a radial grid."""
    lo = m.curvature_start() if m.r_min == 0 else m.r_min
    r = np.linspace(max(lo, 1e-6), R_max, samples)
    K = m.gauss_curvature(r)
    scale = max(1.0, float(np.max(np.abs(K))))
    if np.all(K <= 1e-12 * scale):
        return "nonpositive"
    if np.all(K >= -1e-12 * scale):
        return "nonnegative"
    return "mixed"


def _bisect_a(pred, tol, a_cap):
    lo, hi = 0.0, a_cap
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def _a0_bracket(m, R_max, tol, a_cap, tail_test):
    def pred(a):
        return feasible(m, StabilityParams(a), R_max, tail_test) if a > 0 else True

    sign = curvature_sign(m, R_max)
    if pred(a_cap):
        return a_cap, math.inf, "bisection" if sign == "nonpositive" else "scan", True
    if sign == "nonpositive":
        lo, hi = _bisect_a(pred, tol, a_cap)
        return lo, hi, "bisection", False
    # monotonicity in a is not available: scan the whole grid
    grid = np.arange(0.0, a_cap + 0.5 * tol, tol)
    lo = 0.0
    for a in grid[1:]:
        if not pred(float(a)):
            return lo, float(a), "scan", False
        lo = float(a)
    return lo, math.inf, "scan", True


def estimate_a0(m, R_max, tol=1e-3, a_cap=A_CAP, tail_test=True, compare=True):
    """Bracket for the largest ``a`` with a positive solution of ``Delta u = a K u``.

    Bisection is used when ``K <= 0`` (feasibility is then monotone in ``a``);
    otherwise a flagged grid scan with spacing ``tol``.  ``compare`` repeats
    the estimate at ``2 R_max`` to expose truncation effects.
    """
    R_max = _end_radius(m, R_max)
    if not tol > 0:
        raise PreconditionError("tol > 0 required")
    lo, hi, method, unbounded = _a0_bracket(m, R_max, tol, a_cap, tail_test)
    rz = None
    if not unbounded:
        rz = shoot_positive_solution(m, StabilityParams(hi), R_max)
    res = SpectralResult(lo, hi, rz, R_max, tol, method=method, unbounded=unbounded,
                         tail_test=tail_test)
    if compare and 2.0 * R_max <= m.r_max and not math.isinf(2.0 * R_max):
        lo2, hi2, _, unb2 = _a0_bracket(m, 2.0 * R_max, tol, a_cap, tail_test)
        res.a0_high_2R = hi2
        res.convergence_gap = None if (unbounded or unb2) else hi - hi2
    return res


def a_scan(m, R_max, a_values, p=None):
    """First-zero radius for each ``a`` (``None`` when the solution stays positive)."""
    V = Potential.zero() if p is None else p.V
    return [shoot_positive_solution(m, StabilityParams(float(a), V), R_max) for a in a_values]


# first Dirichlet eigenvalue -------------------------------------------------------


def _q_max(m, p, s, samples=1024):
    args = _kernel_inputs(m, p)
    r0 = _initial_data(m, args, p.a, 0.0)[0]
    grid = np.geomspace(r0, s, samples) if r0 > 0 else np.linspace(s / samples, s, samples)
    return max(kernels.coefficients(*args, p.a, float(r))[2] for r in grid)


def lambda1(m, p, s, rtol=1e-11):
    """First Dirichlet eigenvalue of ``-L`` on ``D(s)`` by bisection on ``lam``.

    The first zero of the shooting solution moves inward as ``lam`` grows;
    the eigenvalue is the ``lam`` at which it reaches ``s``.
    """
    s = _end_radius(m, s)
    # for lam + q <= 0 the solution is nondecreasing, hence has no zero
    lo = -_q_max(m, p, s)
    hi = max(lo + 1.0, 1.0)
    while first_zero(m, p, s, hi) is None:
        lo, hi = hi, hi + 2.0 * (hi - lo)
        if hi > 1e12:
            raise IntegrationError("no eigenvalue bracket found", last_radius=s)
    while hi - lo > rtol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if first_zero(m, p, s, mid) is None:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lambda1_curve(m, p, s_grid):
    return [(float(s), lambda1(m, p, float(s))) for s in s_grid]


def lambda1_fd(m, p, s, n=FD_NODES):
    """Independent oracle: cell-centred finite volumes on ``[r_min, s]``.

    ``-(tau u')'/tau - q u = lam u`` is discretized with fluxes at cell faces,
    a zero flux at the pole and a ghost cell for ``u(s) = 0``, and the
    symmetrized tridiagonal pencil is solved for its smallest eigenvalue.
    """
    from scipy.linalg import eigh_tridiagonal

    s = _end_radius(m, s)
    h = (s - m.r_min) / n
    faces = m.r_min + h * np.arange(n + 1)
    centres = 0.5 * (faces[1:] + faces[:-1])
    tf = m.tau(faces)
    tc = m.tau(centres)
    args = _kernel_inputs(m, p)
    q = np.array([kernels.coefficients(*args, p.a, float(r))[2] for r in centres])
    diag = (tf[:-1] + tf[1:]) / h**2 - tc * q
    diag[-1] += tf[-1] / h**2  # ghost value -u_{n-1} at the outer face
    diag[0] -= tf[0] / h**2  # no flux through the inner face
    off = -tf[1:-1] / h**2
    w = 1.0 / np.sqrt(tc)
    d = diag * w * w
    e = off * w[:-1] * w[1:]
    vals = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))
    return float(vals[0])


# inradius bound ------------------------------------------------------------------


@dataclass
class DistanceBoundResult:
    s_star: float | None
    method: str
    failure_s: float | None
    found: bool
    k: float
    b: float
    s_cap: float
    delta0: float | None = None
    beta: float | None = None
    scan: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def _auto_b(k):
    """A ``b > 1`` with ``2(b+1) >= k > 2b``: the midpoint of the admissible range."""
    lo = max(1.0, k / 2.0 - 1.0)
    hi = k / 2.0
    if not hi > lo:
        raise PreconditionError(f"no b > 1 with 2(b+1) >= k > 2b for k={k!r}")
    return 0.5 * (lo + hi)


def distance_bound(m, p, b=None, s_scan=(1.0, 1e4), growth=1.25, beta=1.01,
                   window=None, rtol=1e-10):
    """Radius past which a stable disk with ``V >= c`` cannot exist.

    ``k <= 2`` uses the weighted bound from the power cutoff with
    ``c a(s/2)/4`` on the left (``b = 1``); ``k > 2`` uses the log-power
    estimate with ``c beta^(2b) a(s e^-beta)/s^(2b)`` on the left and
    ``delta = delta0``.  The scan stops at the first negative slack and the
    sign change is refined by bisection.
    """
    c = p.c_lower
    if c is None or not c > 0:
        raise PreconditionError("distance bound needs a certified lower bound c > 0 for V")
    a = p.a
    try:
        k, _ = growth_constants(m, window or (10.0, 1000.0))
    except FitUndefinedError:
        k = 2.0 if math.isfinite(m.r_max) else math.inf
    s_lo, s_cap = float(s_scan[0]), min(float(s_scan[1]), m.r_max)
    if k <= 2.0:
        method, b = "mpr", 1.0 if b is None else float(b)
        d0 = bt = None

        def slack(s):
            lhs = c * 0.5 ** (2.0 * b) * disk_area(m, 0.5 * s)
            return mpr_rhs(m, a, b, s) - lhs
    else:
        if not math.isfinite(k):
            raise FitUndefinedError(f"{m.name} has no finite area growth degree")
        method = "estimatepos"
        b = _auto_b(k) if b is None else float(b)
        if not (2.0 * (b + 1.0) >= k > 2.0 * b > 2.0):
            raise PreconditionError(f"2(b+1) >= k > 2b > 2 required (b={b}, k={k})")
        al = alpha_of(a, b)
        if not al > 0:
            raise PreconditionError(f"alpha > 0 required (alpha={al!r})")
        d0 = delta0_minimizer(al, b, k).delta0
        bt = beta
        s_lo = max(s_lo, 1.01 * (al + d0), bt * 1.01)
        params = AlphaParams(a, b, d0)

        def slack(s):
            params.check(s)
            const = 2.0 * a * (math.pi + b * (TWO_PI - kmin_profile(m, s * math.exp(-s))) / s)
            lhs = c * bt ** (2.0 * b) / s ** (2.0 * b) * disk_area(m, s * math.exp(-bt))
            return const + rho_plus(m, a, b, d0, s) - lhs

    scan = []
    prev, s = None, s_lo
    while s <= s_cap:
        v = slack(s)
        scan.append((s, v))
        if v < 0:
            break
        prev, s = s, s * growth
    else:
        return DistanceBoundResult(None, method, None, False, k, b, s_cap, d0, bt, scan)
    if prev is None:
        # already negative at the first radius
        return DistanceBoundResult(s, method, s, True, k, b, s_cap, d0, bt, scan)
    lo, hi = prev, s
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if slack(mid) < 0:
            hi = mid
        else:
            lo = mid
    return DistanceBoundResult(hi, method, hi, True, k, b, s_cap, d0, bt, scan)


# potential growth and total curvature ------------------------------------------


@dataclass
class PotentialGrowthReport:
    s: list
    integral: list
    ratio: list
    lambda1: list
    sup_ratio: float
    k: float | None
    hypothesis_ok: bool
    integrable_trend: bool | None

    def to_dict(self):
        return asdict(self)


def potential_integral(m, V, s):
    if V.is_zero:
        return 0.0
    return TWO_PI * quad(lambda r: V(r) * m.tau(r), m.r_min, s)


def potential_growth_check(m, p, b, s_grid, certify=True):
    """``int_{D(s)} V`` against ``s^(2b)`` along a grid, with the stability hypothesis
    checked through ``lambda_1 >= 0`` on each disk."""
    s_grid = [float(x) for x in s_grid]
    ints = [potential_integral(m, p.V, s) for s in s_grid]
    ratios = [v / s ** (2.0 * b) for v, s in zip(ints, s_grid)]
    lams = [lambda1(m, p, s) for s in s_grid] if certify else []
    ok = all(lam >= 0.0 for lam in lams)
    try:
        k = growth_constants(m, (10.0, 1000.0))[0]
    except FitUndefinedError:
        k = None
    trend = None
    if k is not None and k <= 2.0 and len(ints) > 1:
        # bounded running integral: the last increment is small relative to the total
        trend = ints[-1] - ints[-2] <= 0.05 * max(ints[-1], 1e-300) or ints[-1] == 0.0
    return PotentialGrowthReport(s_grid, ints, ratios, lams, max(ratios) if ratios else 0.0,
                                 k, ok, trend)


@dataclass
class CurvatureReport:
    R_max: float
    K_plus: float
    K_minus: float
    total: float
    two_pi_chi: float
    k_hat: float | None
    integrable: bool
    total_in_range: bool
    quadratic_growth: bool | None
    assumed: tuple = ("parabolic",)

    def to_dict(self):
        return asdict(self)


def curvature_integrability_report(m, R_max, window=None):
    """Positive and negative parts of the total curvature of ``D(R_max)``."""
    R_max = float(R_max)
    if R_max > m.r_max:
        raise DomainError(f"R_max={R_max} beyond r_max={m.r_max}")
    start = m.curvature_start()

    def dens(r):
        return -m.d2tau_eval(r)

    kp = TWO_PI * quad(lambda r: np.maximum(dens(r), 0.0), start, R_max)
    km = TWO_PI * quad(lambda r: np.minimum(dens(r), 0.0), start, R_max)
    total = kp + km
    k_hat = None
    if math.isinf(m.r_max):
        known = m.aag()
        if known is not None:
            k_hat = known[0]
        else:
            from .asymptotics import aag_fit

            w = window or (max(R_max / 100.0, 1e-3), R_max)
            try:
                k_hat = aag_fit(m, w).k_hat
            except FitUndefinedError:
                k_hat = None
    return CurvatureReport(
        R_max, kp, km, total, TWO_PI,
        k_hat,
        math.isfinite(kp) and math.isfinite(km),
        -1e-8 <= total <= TWO_PI + 1e-8,
        None if k_hat is None else k_hat <= 2.0 + 1e-9,
    )
