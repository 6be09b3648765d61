"""Radial potentials ``V >= 0`` and the operator data ``(a, V, c)``."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

# kernel codes, shared with kernels.py
ZERO, CONSTANT, DECAY, TABULATED = range(4)
_CODES = {"zero": ZERO, "constant": CONSTANT, "decay": DECAY, "custom": TABULATED}


@dataclass(frozen=True, eq=False)
class Potential:
    """``zero``, ``constant:c``, ``decay:c,p`` for ``c/(1+r)^p`` or ``custom`` samples."""

    kind: str
    params: tuple = ()
    spline: CubicSpline | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in _CODES:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "constant" and not self.params[0] > 0:
            raise ValueError("constant potential needs c > 0")
        if self.kind == "decay" and not (self.params[0] > 0 and self.params[1] >= 0):
            raise ValueError("decay potential needs c > 0 and p >= 0")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "constant":
            return np.full_like(r, self.params[0])
        if self.kind == "decay":
            c, p = self.params
            return c / (1.0 + r) ** p
        return np.maximum(self.spline(r), 0.0)

    @property
    def is_zero(self):
        return self.kind == "zero"

    @property
    def name(self):
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(repr(float(p)) for p in self.params)

    def kernel_args(self):
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

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def constant(cls, c):
        return cls("constant", (float(c),))

    @classmethod
    def decay(cls, c=1.0, p=3.0):
        return cls("decay", (float(c), float(p)))

    @classmethod
    def from_samples(cls, r, v):
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=float)
        if r.size < 4 or r.shape != v.shape:
            raise ValueError("custom potential needs at least 4 (r, V) rows")
        if not np.all(np.diff(r) > 0):
            raise ValueError("custom potential radii must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("potential must be nonnegative")
        return cls("custom", (), CubicSpline(r, v))

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
        name, _, arg = str(text).partition(":")
        name = name.strip().lower()
        if name == "zero":
            return cls.zero()
        if name == "constant":
            return cls.constant(float(arg))
        if name == "decay":
            vals = [float(x) for x in arg.split(",")] if arg else []
            return cls.decay(*vals)
        if name == "custom":
            if not arg or not Path(arg).exists():
                raise FileNotFoundError(f"custom potential file {arg!r} not found")
            return cls.from_csv(arg)
        raise ValueError(f"unknown potential {name!r}")


@dataclass(frozen=True, eq=False)
class StabilityParams:
    """Data of ``L = Delta + V - a K``; ``c_lower`` certifies ``V >= c``.

    ``a = 0`` is admitted for the plain Schrodinger operator ``Delta + V``.
    """

    a: float
    V: Potential = field(default_factory=Potential.zero)
    c_lower: float | None = None

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"a >= 0 required, got a={self.a!r}")
        if self.c_lower is not None and not self.c_lower > 0:
            raise ValueError("c_lower must be positive when given")

    def certify(self, r_lo, r_hi, samples=2048):
        """Check ``V >= 0`` (and ``V >= c_lower``) on a dense grid; raises on failure."""
        r_hi = min(r_hi, 1e6) if math.isinf(r_hi) else r_hi
        grid = np.linspace(r_lo, r_hi, samples)
        v = self.V(grid)
        if np.any(v < 0):
            raise ValueError("potential takes negative values")
        if self.c_lower is not None and np.any(v < self.c_lower):
            raise ValueError(f"potential drops below c_lower={self.c_lower}")
        return True
