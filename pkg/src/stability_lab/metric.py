"""Rotationally symmetric metrics ``dr^2 + tau(r)^2 dtheta^2`` and their
geodesic-disk quantities (length, area, total curvature).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateMetricError, DomainError
from .quadrature import cumulative, quad

TWO_PI = 2.0 * math.pi
TAU_FLOOR = 1e-300
APEX_START = 1e-8
KMIN_SAMPLES = 512

# kernel codes, shared with kernels.py
EUCLIDEAN, HYPERBOLIC, SPHERE, CONE, SCHOEN, TABULATED = range(6)
_CODES = {
    "euclidean": EUCLIDEAN,
    "hyperbolic": HYPERBOLIC,
    "sphere": SPHERE,
    "cone": CONE,
    "schoen": SCHOEN,
    "custom": TABULATED,
}


@dataclass(frozen=True, eq=False)
class WarpedMetric:
    """Profile ``tau`` of a rotational metric with its domain metadata.

    ``dtau``/``d2tau`` are analytic for registry metrics and ``None`` for
    custom profiles, in which case central differences are used.
    """

    kind: str
    params: tuple
    tau: Callable
    dtau: Callable | None
    d2tau: Callable | None
    r_min: float
    r_max: float
    smooth_origin: bool
    spline: CubicSpline | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in _CODES:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.r_min < 0 or not self.r_max > self.r_min:
            raise ValueError("metric domain must satisfy 0 <= r_min < r_max")
        if self.smooth_origin:
            if self.r_min != 0.0:
                raise ValueError("smooth_origin requires r_min = 0")
            if abs(float(self.tau(np.array([0.0]))[0])) > 1e-12:
                raise ValueError("smooth_origin requires tau(0) = 0")
            if abs(float(self.dtau_eval(np.array([0.0]))[0]) - 1.0) > 1e-10:
                raise ValueError("smooth_origin requires tau'(0) = 1")

    @property
    def name(self):
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(repr(float(p)) for p in self.params)

    @property
    def is_registry(self):
        return self.kind != "custom"

    def _step(self, r):
        return 1e-5 * np.maximum(1.0, np.abs(r))

    def dtau_eval(self, r):
        r = np.asarray(r, dtype=float)
        if self.dtau is not None:
            return self.dtau(r)
        if self.spline is not None:
            return self.spline(r, 1)
        h = self._step(r)
        return (self.tau(r + h) - self.tau(r - h)) / (2.0 * h)

    def d2tau_eval(self, r):
        """``tau''`` for integrands: analytic, else the interpolant's own second
        derivative (differencing noise would stall a 1e-10 quadrature)."""
        r = np.asarray(r, dtype=float)
        if self.d2tau is not None:
            return self.d2tau(r)
        if self.spline is not None:
            return self.spline(r, 2)
        return self.d2tau_fd(r)

    def d2tau_fd(self, r):
        """Central difference with step ``1e-5 max(1, r)``."""
        r = np.asarray(r, dtype=float)
        h = self._step(r)
        return (self.tau(r + h) - 2.0 * self.tau(r) + self.tau(r - h)) / (h * h)

    def gauss_curvature(self, r):
        """Vectorized ``-tau''/tau`` with no domain checks."""
        r = np.asarray(r, dtype=float)
        return -self.d2tau_eval(r) / self.tau(r)

    def aag(self):
        """Closed-form ``(k, C)`` with ``a(s) ~ C s^k`` when known, else ``None``."""
        if self.kind == "euclidean":
            return 2.0, math.pi
        if self.kind == "cone":
            return 2.0, math.pi * self.params[0]
        if self.kind == "schoen":
            eps = self.params[0]
            return 2.0 + eps, TWO_PI / (eps * (1.0 + eps))
        return None

    def curvature_start(self):
        """Lower limit for curvature integrals (skips a non-smooth apex)."""
        if self.smooth_origin:
            return self.r_min
        return max(self.r_min, APEX_START)

    def kernel_args(self):
        """``(code, params, knots, coeffs)`` for the compiled ODE kernels."""
        code = _CODES[self.kind]
        par = np.zeros(2)
        par[: len(self.params)] = self.params
        if self.spline is None:
            return code, par, np.zeros(2), np.zeros((4, 1))
        return (
            code,
            par,
            np.ascontiguousarray(self.spline.x, dtype=float),
            np.ascontiguousarray(self.spline.c, dtype=float),
        )

    def check_radius(self, r, open_interval=False):
        r = float(r)
        if open_interval:
            ok = self.r_min < r < self.r_max
        else:
            ok = self.r_min <= r <= self.r_max
        if not ok or math.isnan(r):
            bounds = "(r_min, r_max)" if open_interval else "[r_min, r_max]"
            raise DomainError(
                f"radius {r!r} outside {bounds} = ({self.r_min}, {self.r_max}) of {self.name}"
            )
        return r

    # registry -----------------------------------------------------------------

    @classmethod
    def euclidean(cls):
        return cls(
            "euclidean", (), lambda r: np.asarray(r, dtype=float) * 1.0,
            lambda r: np.ones_like(np.asarray(r, dtype=float)),
            lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            0.0, math.inf, True,
        )

    @classmethod
    def hyperbolic(cls, kappa=1.0):
        if not kappa > 0:
            raise ValueError("hyperbolic metric needs kappa > 0")
        k = math.sqrt(kappa)
        return cls(
            "hyperbolic", (float(kappa),),
            lambda r: np.sinh(k * np.asarray(r, dtype=float)) / k,
            lambda r: np.cosh(k * np.asarray(r, dtype=float)),
            lambda r: k * np.sinh(k * np.asarray(r, dtype=float)),
            0.0, math.inf, True,
        )

    @classmethod
    def sphere(cls, kappa=1.0):
        if not kappa > 0:
            raise ValueError("sphere metric needs kappa > 0")
        k = math.sqrt(kappa)
        return cls(
            "sphere", (float(kappa),),
            lambda r: np.sin(k * np.asarray(r, dtype=float)) / k,
            lambda r: np.cos(k * np.asarray(r, dtype=float)),
            lambda r: -k * np.sin(k * np.asarray(r, dtype=float)),
            0.0, math.pi / k, True,
        )

    @classmethod
    def cone(cls, beta=0.5):
        if not 0 < beta <= 1:
            raise ValueError("cone metric needs beta in (0, 1]")
        return cls(
            "cone", (float(beta),),
            lambda r: beta * np.asarray(r, dtype=float),
            lambda r: np.full_like(np.asarray(r, dtype=float), beta),
            lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            0.0, math.inf, beta == 1.0,
        )

    @classmethod
    def schoen(cls, eps=0.5):
        """Power profile ``tau = c r^(1+eps)`` with ``c = (2+eps)/(eps(1+eps))``.

        The constant fixes the disk areas at ``2 pi r^(2+eps) / (eps(1+eps))``.
        """
        if not eps > 0:
            raise ValueError("schoen metric needs eps > 0")
        e = float(eps)
        c = schoen_scale(e)
        return cls(
            "schoen", (e,),
            lambda r: c * np.asarray(r, dtype=float) ** (1.0 + e),
            lambda r: c * (1.0 + e) * np.asarray(r, dtype=float) ** e,
            lambda r: c * (1.0 + e) * e * np.asarray(r, dtype=float) ** (e - 1.0),
            0.0, math.inf, False,
        )

    @classmethod
    def from_samples(cls, r, tau):
        """Custom profile through ``(r, tau)`` samples, cubic in between."""
        r = np.asarray(r, dtype=float)
        tau = np.asarray(tau, dtype=float)
        if r.ndim != 1 or r.shape != tau.shape:
            raise ValueError("custom profile needs two equal-length columns")
        if r.size < 64:
            raise ValueError(f"custom profile needs at least 64 rows, got {r.size}")
        if not np.all(np.diff(r) > 0):
            raise ValueError("custom profile radii must be strictly increasing")
        if r[0] < 0:
            raise ValueError("custom profile radii must be nonnegative")
        if np.any(tau[1:] <= 0) or tau[0] < 0:
            raise ValueError("custom profile tau must be positive inside the domain")
        # clamp tau'(0) = 1 when the samples start like a smooth pole
        slope = (tau[1] - tau[0]) / (r[1] - r[0])
        smooth = r[0] == 0.0 and tau[0] == 0.0 and abs(slope - 1.0) < 1e-3
        bc = ((1, 1.0), "not-a-knot") if smooth else "not-a-knot"
        spline = CubicSpline(r, tau, bc_type=bc)
        return cls(
            "custom", (), lambda x: spline(np.asarray(x, dtype=float)), None, None,
            float(r[0]), float(r[-1]), bool(smooth), spline,
        )

    @classmethod
    def from_csv(cls, path):
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    if rows:
                        raise
        data = np.array(rows, dtype=float).reshape(-1, 2)
        return cls.from_samples(data[:, 0], data[:, 1])

    @classmethod
    def parse(cls, text):
        """Build from the config vocabulary, e.g. ``hyperbolic:1``, ``custom:tau.csv``."""
        name, _, arg = str(text).partition(":")
        name = name.strip().lower()
        if name == "custom":
            if not arg or not Path(arg).exists():
                raise FileNotFoundError(f"custom metric file {arg!r} not found")
            return cls.from_csv(arg)
        ctor = {
            "euclidean": cls.euclidean,
            "hyperbolic": cls.hyperbolic,
            "sphere": cls.sphere,
            "cone": cls.cone,
            "schoen": cls.schoen,
        }.get(name)
        if ctor is None:
            raise ValueError(f"unknown metric {name!r}")
        if name == "euclidean":
            if arg:
                raise ValueError("euclidean metric takes no parameter")
            return ctor()
        if not arg:
            return ctor()
        return ctor(float(arg))


def registry_metrics():
    """One representative of each registry family."""
    return [
        WarpedMetric.euclidean(),
        WarpedMetric.hyperbolic(1.0),
        WarpedMetric.sphere(1.0),
        WarpedMetric.cone(0.5),
        WarpedMetric.schoen(0.5),
    ]


def schoen_scale(eps):
    return (2.0 + eps) / (eps * (1.0 + eps))


class StepProfile:
    """Piecewise-constant integer profile: ``values[i]`` on ``(breaks[i-1], breaks[i]]``."""

    def __init__(self, breaks=(), values=(1,)):
        self.breaks = tuple(float(b) for b in breaks)
        self.values = tuple(int(v) for v in values)
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("StepProfile needs len(values) == len(breaks) + 1")
        if any(b2 <= b1 for b1, b2 in zip(self.breaks, self.breaks[1:])):
            raise ValueError("StepProfile breaks must be increasing")

    def __call__(self, r):
        idx = np.searchsorted(self.breaks, np.asarray(r, dtype=float), side="left")
        return np.asarray(self.values, dtype=float)[idx]

    @property
    def breakpoints(self):
        return self.breaks

    @property
    def max_value(self):
        return max(self.values)

    def __repr__(self):
        return f"StepProfile(breaks={self.breaks}, values={self.values})"


CHI_DISK = StepProfile()


@dataclass(frozen=True)
class DiskGeometry:
    metric: WarpedMetric
    chi_profile: StepProfile = CHI_DISK

    def __post_init__(self):
        if self.chi_profile.max_value > 1:
            raise ValueError("Euler characteristic of a disk is at most 1")


# operations -------------------------------------------------------------------


def _tau_checked(m, r):
    t = float(m.tau(np.array([r]))[0])
    if not t > TAU_FLOOR:
        raise DegenerateMetricError(f"tau({r!r}) = {t!r} is degenerate for {m.name}")
    return t


def curvature(m, r):
    """Gaussian curvature ``-tau''(r)/tau(r)`` at an interior radius."""
    r = m.check_radius(r, open_interval=True)
    t = _tau_checked(m, r)
    x = np.array([r])
    d2 = m.d2tau(x) if m.d2tau is not None else m.d2tau_fd(x)
    return -float(d2[0]) / t


def boundary_length(m, r):
    r = m.check_radius(r)
    return TWO_PI * float(m.tau(np.array([r]))[0])


def disk_area(m, s):
    s = m.check_radius(s)
    return TWO_PI * quad(m.tau, m.r_min, s)


def annulus_area(m, r1, r2):
    """``a(r2) - a(r1)`` computed directly over the annulus."""
    if r1 > r2:
        raise ValueError(f"annulus needs r1 <= r2, got ({r1}, {r2})")
    m.check_radius(r1)
    m.check_radius(r2)
    return TWO_PI * quad(m.tau, float(r1), float(r2))


def _curvature_density(m):
    # K * tau = -tau''
    return lambda r: -m.d2tau_eval(r)


def curvature_integral(m, s):
    """Total curvature ``int_{D(s)} K`` of the geodesic disk."""
    s = m.check_radius(s)
    start = m.curvature_start()
    if s <= start:
        return 0.0
    return TWO_PI * quad(_curvature_density(m), start, s)


def curvature_integral_curve(m, grid):
    """``int_{D(s)} K`` for every ``s`` of a sorted grid starting at the apex."""
    grid = np.asarray(grid, dtype=float)
    return TWO_PI * cumulative(_curvature_density(m), grid)


def kmin_profile(m, r1, samples=KMIN_SAMPLES):
    """Minimum over ``s`` in ``[r_min, r1]`` of the total curvature of ``D(s)``."""
    r1 = m.check_radius(r1)
    start = m.curvature_start()
    if r1 <= start:
        return 0.0
    grid = np.linspace(start, r1, samples)
    values = curvature_integral_curve(m, grid)
    i = int(np.argmin(values))
    best = float(values[i])
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if hi > lo:
        base = float(values[max(i - 1, 0)])
        dens = _curvature_density(m)

        def total(x):
            return base + TWO_PI * quad(dens, lo, x)

        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = total(c), total(d)
        for _ in range(60):
            if b - a <= 1e-12 * max(1.0, abs(b)):
                break
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = total(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = total(d)
        best = min(best, fc, fd)
    return min(best, 0.0)


def shiohama_tanaka_slack(g, r):
    """``2 pi chi(r) - K(r) - l'(r)``; nonnegative by the Shiohama-Tanaka bound."""
    m = g.metric if isinstance(g, DiskGeometry) else g
    chi = g.chi_profile if isinstance(g, DiskGeometry) else CHI_DISK
    r = m.check_radius(r, open_interval=True)
    dl = TWO_PI * float(m.dtau_eval(np.array([r]))[0])
    return TWO_PI * float(chi(r)) - curvature_integral(m, r) - dl
