"""Radial test functions and the quantity ``F = (1-2a) f'^2 - 2a f f''``.

Families: ``linear`` (1 - r/s), ``power`` ((1 - r/s)^b), ``log_power``
((ln(s/r)/s)^b on [s e^-s, s] with a plateau 1 below) and the annular
``huber`` profile used for finite-topology arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import PreconditionError
from .metric import CHI_DISK
from .quadrature import quad

FAMILIES = ("linear", "power", "log_power", "huber")
BOUND_SAMPLES = 256


@dataclass(frozen=True)
class CutoffSpec:
    family: str
    s: float
    b: float = 1.0
    s0: float | None = None
    s1: float | None = None
    s2: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown cutoff family {self.family!r}")
        if not self.s > 0:
            raise ValueError("cutoff radius s must be positive")
        if self.family in ("power", "log_power") and not self.b >= 1:
            raise PreconditionError(f"b >= 1 required, got b={self.b!r}")
        if self.family == "huber":
            s0, s1, s2 = self.s0, self.s1, self.s2
            if None in (s0, s1, s2) or not (s0 < s1 - 1 < s1 < s2 < self.s):
                raise ValueError(
                    f"huber cutoff needs s0 < s1 - 1 < s1 < s2 < s, got "
                    f"({s0}, {s1}, {s2}, {self.s})"
                )

    @classmethod
    def linear(cls, s):
        return cls("linear", float(s))

    @classmethod
    def power(cls, s, b):
        return cls("power", float(s), float(b))

    @classmethod
    def log_power(cls, s, b):
        return cls("log_power", float(s), float(b))

    @classmethod
    def huber(cls, s0, s1, s2, s):
        return cls("huber", float(s), 1.0, float(s0), float(s1), float(s2))

    @property
    def epsilon(self):
        """Start of the decreasing part (plateau radius; ``s2`` for huber)."""
        if self.family == "log_power":
            return self.s * math.exp(-self.s)
        if self.family == "huber":
            return self.s2
        return 0.0

    @property
    def support_start(self):
        return self.s1 - 1.0 if self.family == "huber" else 0.0

    @property
    def breakpoints(self):
        if self.family == "huber":
            return (self.s1 - 1.0, self.s1, self.s2, self.s)
        if self.family == "log_power":
            return (self.epsilon, self.s)
        return (self.s,)

    # vectorized evaluation; breakpoints take the value of the region to their right

    def derivatives(self, r):
        with np.errstate(over="ignore", divide="ignore"):
            return self._derivatives(np.asarray(r, dtype=float))

    def _derivatives(self, r):
        f = np.zeros_like(r)
        df = np.zeros_like(r)
        d2f = np.zeros_like(r)
        s, b = self.s, self.b
        if self.family == "huber":
            s1, s2 = self.s1, self.s2
            up = (r >= s1 - 1.0) & (r < s1)
            f[up] = r[up] - s1 + 1.0
            df[up] = 1.0
            f[(r >= s1) & (r < s2)] = 1.0
            down = (r >= s2) & (r < s)
            f[down] = (s - r[down]) / (s - s2)
            df[down] = -1.0 / (s - s2)
            return f, df, d2f
        eps = self.epsilon
        f[r < eps] = 1.0
        mid = (r >= eps) & (r < s)
        x = r[mid]
        if self.family == "linear":
            f[mid] = 1.0 - x / s
            df[mid] = -1.0 / s
        elif self.family == "power":
            u = 1.0 - x / s
            f[mid] = u**b
            df[mid] = -(b / s) * u ** (b - 1.0)
            if b != 1.0:
                d2f[mid] = b * (b - 1.0) / s**2 * u ** (b - 2.0)
        else:
            g = np.log(s / x) / s
            f[mid] = g**b
            df[mid] = -(b / (s * x)) * g ** (b - 1.0)
            d2 = (b / (s * x * x)) * g ** (b - 1.0)
            if b != 1.0:
                d2 = d2 + (b * (b - 1.0) / (s * s * x * x)) * g ** (b - 2.0)
            d2f[mid] = d2
        return f, df, d2f

    def f(self, r):
        return self.derivatives(r)[0]

    def df(self, r):
        return self.derivatives(r)[1]


class CutoffValue(NamedTuple):
    f: float
    df: float
    d2f: float
    at_breakpoint: bool


@dataclass(frozen=True)
class AlphaParams:
    """``alpha = 1 + b (1 - 4a) / (2a)`` together with the gap ``delta``."""

    a: float
    b: float
    delta: float
    alpha: float | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise PreconditionError("a > 0 required")
        if not self.b >= 1:
            raise PreconditionError(f"b >= 1 required, got b={self.b!r}")
        if not self.delta > 0:
            raise PreconditionError("delta > 0 required")
        alpha = alpha_of(self.a, self.b)
        if self.alpha is None:
            object.__setattr__(self, "alpha", alpha)
        elif self.alpha != alpha:
            raise ValueError(f"stored alpha {self.alpha!r} != recomputed {alpha!r}")

    def check(self, s):
        if not self.alpha > 0:
            raise PreconditionError(f"alpha > 0 required (alpha={self.alpha!r})")
        if not s > self.alpha + self.delta:
            raise PreconditionError(
                f"s > alpha + delta required (s={s!r}, alpha + delta={self.alpha + self.delta!r})"
            )

    def intervals(self, s):
        """The three radial intervals on which ``F`` has a fixed sign bound."""
        self.check(s)
        e1 = s * math.exp(-(self.alpha + self.delta))
        e2 = s * math.exp(-self.alpha)
        return (s * math.exp(-s), e1), (e1, e2), (e2, s)


def alpha_of(a, b):
    return 1.0 + b * (1.0 - 4.0 * a) / (2.0 * a)


def eval_cutoff(spec, r):
    """``(f, f', f'')`` at one radius; breakpoints return right-hand limits."""
    r = float(r)
    if not 0.0 <= r <= spec.s:
        raise ValueError(f"r={r!r} outside [0, s={spec.s}]")
    f, df, d2f = spec.derivatives(np.array([r]))
    flagged = any(r == p for p in spec.breakpoints)
    return CutoffValue(float(f[0]), float(df[0]), float(d2f[0]), flagged)


def f_minus_at_epsilon(spec):
    """Limit of ``f'(r)`` as ``r`` decreases to the plateau radius."""
    if spec.family == "linear":
        return -1.0 / spec.s
    if spec.family == "power":
        return -spec.b / spec.s
    if spec.family == "huber":
        return -1.0 / (spec.s - spec.s2)
    s = spec.s
    return -spec.b / (s * s * math.exp(-s))


def F_raw(spec, a, r):
    """``(1-2a) f'^2 - 2a f f''`` from the derivatives themselves."""
    f, df, d2f = spec.derivatives(r)
    return (1.0 - 2.0 * a) * df * df - 2.0 * a * f * d2f


def F_profile(spec, a, r):
    """``F(r)`` in closed form; for ``log_power`` the factored expression

        F = 2ab g^(2(b-1)) / (s^2 r^2) * (alpha - s g),   g = ln(s/r)/s,

    which stays bounded as ``r -> s`` even where ``f''`` diverges (b < 2).
    """
    r = np.asarray(r, dtype=float)
    s, b = spec.s, spec.b
    out = np.zeros_like(r)
    if spec.family == "huber":
        return F_raw(spec, a, r)
    mid = (r >= spec.epsilon) & (r < s)
    x = r[mid]
    if spec.family == "linear":
        out[mid] = (1.0 - 2.0 * a) / s**2
    elif spec.family == "power":
        out[mid] = (b / s**2) * (1.0 - x / s) ** (2.0 * b - 2.0) * (b * (1.0 - 4.0 * a) + 2.0 * a)
    else:
        g = np.log(s / x) / s
        alpha = alpha_of(a, b)
        out[mid] = 2.0 * a * b * g ** (2.0 * (b - 1.0)) / (s * s * x * x) * (alpha - s * g)
    return out


def F_weighted(spec, a, r, weight):
    """``F(r) w(r)`` arranged so that ``w ~ r`` near a tiny plateau radius
    does not pass through an overflowing ``1/r^2``."""
    r = np.asarray(r, dtype=float)
    w = np.asarray(weight, dtype=float)
    if spec.family != "log_power":
        return F_profile(spec, a, r) * w
    s, b = spec.s, spec.b
    out = np.zeros_like(r)
    mid = (r >= spec.epsilon) & (r < s)
    x = r[mid]
    g = np.log(s / x) / s
    alpha = alpha_of(a, b)
    out[mid] = 2.0 * a * b * g ** (2.0 * (b - 1.0)) / (s * s) * ((w[mid] / x) / x) * (alpha - s * g)
    return out


@dataclass(frozen=True)
class IntervalBoundsReport:
    bounds: tuple
    worst_slack: tuple
    intervals: tuple

    @property
    def holds(self):
        return all(w >= -1e-10 for w in self.worst_slack)


def interval_bound_values(params, s):
    a, b, al, d = params.a, params.b, params.alpha, params.delta
    scale = s ** (2.0 * (b + 1.0))
    b1 = -2.0 * d * a * b * (al + d) ** (2.0 * (b - 1.0)) * math.exp(2.0 * (al + d)) / scale
    b3 = 2.0 * a * b * al ** (2.0 * b - 1.0) * math.exp(2.0 * al) / scale
    return b1, 0.0, b3


def interval_bounds_check(spec, params, s, samples=BOUND_SAMPLES):
    """Sample ``F`` on the three intervals and compare with the upper bounds.

    ``worst_slack`` is normalized by ``max(1, |bound|, max |F|)`` on each interval.
    """
    if spec.family != "log_power":
        raise ValueError("interval bounds apply to the log_power cutoff")
    if spec.s != s or spec.b != params.b:
        raise ValueError("cutoff (s, b) must match the bound parameters")
    ivals = params.intervals(s)
    bounds = interval_bound_values(params, s)
    worst = []
    for (lo, hi), bound in zip(ivals, bounds):
        r = np.geomspace(lo, hi, samples)
        # right end of the support: evaluate the left limit
        r[-1] = np.nextafter(r[-1], 0.0) if hi == s else r[-1]
        # bounds are attained at interval ends where F is large; compare in
        # units of the local magnitude of F
        F = F_profile(spec, params.a, r)
        scale = max(1.0, abs(bound), float(np.max(np.abs(F))))
        worst.append(float(np.min(bound - F) / scale))
    return IntervalBoundsReport(bounds, tuple(worst), ivals)


def _chi_breaks(chi):
    return tuple(getattr(chi, "breakpoints", ()))


def check_chi(chi, s):
    """Euler characteristic profiles of disks never exceed 1."""
    if hasattr(chi, "max_value"):
        ok = chi.max_value <= 1
    else:
        ok = bool(np.all(chi(np.linspace(0.0, s, 4096)) <= 1))
    if not ok:
        raise PreconditionError("chi(r) <= 1 required")


def G_term(spec, chi_profile=CHI_DISK, s=None):
    """``-int (f^2)' chi`` over the decreasing part ``[epsilon, s]``."""
    s = spec.s if s is None else s
    check_chi(chi_profile, s)
    points = spec.breakpoints + _chi_breaks(chi_profile)

    def integrand(r):
        f, df, _ = spec.derivatives(r)
        return -2.0 * f * df * chi_profile(r)

    return quad(integrand, spec.epsilon, s, points=points)
