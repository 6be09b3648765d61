"""Large-radius behaviour of the error term ``rho+`` and area-growth fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cutoff import AlphaParams, alpha_of
from .errors import DegenerateNormalizationError, FitUndefinedError, PreconditionError
from .metric import annulus_area, disk_area

DELTA_BRACKET = (1e-3, 10.0)
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def rho_plus(m, a, b, delta, s):
    """Error term of the log-power estimate, from exact annulus areas."""
    params = AlphaParams(a, b, delta)
    params.check(s)
    al = params.alpha
    scale = s ** (2.0 * (b + 1.0))
    outer = annulus_area(m, s * math.exp(-al), s)
    inner = annulus_area(m, s * math.exp(-s), s * math.exp(-(al + delta)))
    weight = delta * math.exp(2.0 * delta) / al * (1.0 + delta / al) ** (2.0 * (b - 1.0))
    return 2.0 * a * b * al ** (2.0 * b - 1.0) * math.exp(2.0 * al) * (outer / scale - weight * inner / scale)


def rho_plus_curve(m, a, b, delta, s_grid):
    return np.array([rho_plus(m, a, b, delta, float(s)) for s in s_grid])


def C_plus(a, b, C):
    al = alpha_of(a, b)
    return 2.0 * a * b * C * al ** (2.0 * b - 1.0) * math.exp(2.0 * al)


def rho_tilde(alpha, b, k, delta):
    """Normalized asymptotic profile of ``rho+`` as a function of ``delta``."""
    if not (alpha > 0 and k > 0 and delta > 0):
        raise PreconditionError("rho_tilde needs alpha > 0, k > 0, delta > 0")
    x = delta / alpha
    return 1.0 - math.exp(-k * alpha) * (1.0 + math.exp((2.0 - k) * delta) * x * (1.0 + x) ** (2.0 * (b - 1.0)))


@dataclass(frozen=True)
class Delta0Result:
    delta0: float
    rho_min: float
    boundary_flag: bool


def delta0_minimizer(alpha, b, k, bracket=DELTA_BRACKET, tol=1e-8):
    """Golden-section minimum of ``rho_tilde`` over a compact ``delta`` bracket.

    ``boundary_flag`` marks a minimizer at a bracket end, which is what
    happens for ``k <= 2`` where ``rho_tilde`` decreases without bound.
    """
    if not alpha > 0:
        raise PreconditionError(f"alpha > 0 required (alpha={alpha!r})")
    lo, hi = float(bracket[0]), float(bracket[1])

    def fn(d):
        return rho_tilde(alpha, b, k, d)

    a_, b_ = lo, hi
    c = b_ - INVPHI * (b_ - a_)
    d = a_ + INVPHI * (b_ - a_)
    fc, fd = fn(c), fn(d)
    while b_ - a_ > tol:
        if fc < fd:
            b_, d, fd = d, c, fc
            c = b_ - INVPHI * (b_ - a_)
            fc = fn(c)
        else:
            a_, c, fc = c, d, fd
            d = a_ + INVPHI * (b_ - a_)
            fd = fn(d)
    x = 0.5 * (a_ + b_)
    best, fbest = x, fn(x)
    for edge in (lo, hi):
        fe = fn(edge)
        if fe < fbest:
            best, fbest = edge, fe
    flag = min(abs(best - lo), abs(best - hi)) <= 10.0 * tol
    return Delta0Result(best, fbest, flag)


@dataclass(frozen=True)
class RhoAsymptotics:
    a: float
    b: float
    alpha: float
    k: float
    C: float
    C_plus: float
    delta0: float
    rho_min: float
    bracket: tuple
    boundary_flag: bool

    def __post_init__(self):
        expected = C_plus(self.a, self.b, self.C)
        if not math.isclose(self.C_plus, expected, rel_tol=1e-14):
            raise ValueError("C_plus inconsistent with (a, b, C)")


def rho_asymptotics(a, b, k, C, bracket=DELTA_BRACKET):
    al = alpha_of(a, b)
    res = delta0_minimizer(al, b, k, bracket)
    return RhoAsymptotics(a, b, al, k, C, C_plus(a, b, C), res.delta0, res.rho_min,
                          tuple(bracket), res.boundary_flag)


@dataclass(frozen=True)
class GrowthFit:
    k_hat: float
    C_hat: float
    residual: float
    s_window: tuple
    drift: float

    @property
    def power_law(self):
        """Heuristic: tiny log-log residual and stable exponent across the window."""
        return self.residual < 1e-3 and self.drift < 0.05


def aag_fit(m, s_window, samples=32):
    """Least-squares fit ``log a(s) = log C + k log s`` over a log-spaced window."""
    lo, hi = float(s_window[0]), float(s_window[1])
    # windows shorter than a decade are allowed (the hyperbolic drift check
    # uses [5, 40]) but the fit is only trusted as a power law via ``power_law``
    if not (lo > 0 and hi > lo):
        raise PreconditionError("aag window needs 0 < s_lo < s_hi")
    if math.isfinite(m.r_max):
        raise FitUndefinedError(f"{m.name} has a bounded domain; area growth is undefined")
    s = np.geomspace(lo, hi, max(samples, 32))
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            area = np.array([disk_area(m, x) for x in s])
        except ArithmeticError as exc:
            raise FitUndefinedError(f"area evaluation failed: {exc}") from exc
    if not np.all(np.isfinite(area)) or np.any(area <= 0):
        raise FitUndefinedError(f"non-finite areas for {m.name} on {s_window}")
    x, y = np.log(s), np.log(area)
    k_hat, logC = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (k_hat * x + logC)) ** 2)))
    half = s.size // 2
    k_lo = np.polyfit(x[:half], y[:half], 1)[0]
    k_hi = np.polyfit(x[half:], y[half:], 1)[0]
    return GrowthFit(float(k_hat), float(math.exp(logC)), resid, (lo, hi), float(abs(k_hi - k_lo)))


def growth_constants(m, s_window=None):
    """``(k, C)`` from the registry closed form, else from :func:`aag_fit`."""
    known = m.aag()
    if known is not None:
        return known
    if s_window is None:
        raise FitUndefinedError(f"{m.name} has no closed-form growth; give a fit window")
    fit = aag_fit(m, s_window)
    return fit.k_hat, fit.C_hat


def asymptotic_ratio(m, a, b, delta, s_grid, k=None, C=None):
    """``rho+(delta, s) / (C+ s^(k - 2(b+1)) rho_tilde(delta))`` along ``s_grid``."""
    s_grid = np.asarray(s_grid, dtype=float)
    if k is None or C is None:
        k, C = growth_constants(m, (float(s_grid.min()), float(s_grid.max())))
    al = alpha_of(a, b)
    rt = rho_tilde(al, b, k, delta)
    if abs(rt) < 1e-12:
        raise DegenerateNormalizationError(f"rho_tilde({delta}) = {rt!r} is numerically zero")
    cp = C_plus(a, b, C)
    out = []
    for s in s_grid:
        out.append(rho_plus(m, a, b, delta, s) / (cp * s ** (k - 2.0 * (b + 1.0)) * rt))
    return np.array(out)
