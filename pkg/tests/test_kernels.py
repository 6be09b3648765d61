"""Compiled and interpreted kernels must agree."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from stability_lab import kernels
from stability_lab._accel import NUMBA_ENABLED
from stability_lab.metric import WarpedMetric
from stability_lab.potential import Potential, StabilityParams

PROBE = r"""
import json
from stability_lab._accel import NUMBA_ENABLED
from stability_lab.metric import WarpedMetric
from stability_lab.potential import Potential, StabilityParams
from stability_lab.spectral import first_zero, lambda1

cases = [
    ("hyperbolic:1", "zero", 0.3, 40.0, 0.0),
    ("schoen:0.5", "decay:1,2", 0.5, 30.0, 0.0),
    ("sphere:1", "constant:0.5", 0.2, 3.0, 2.0),
    ("cone:0.5", "zero", 0.0, 2.0, 5.0),
]
zeros = []
for m, v, a, R, lam in cases:
    zeros.append(first_zero(WarpedMetric.parse(m), StabilityParams(a, Potential.parse(v)), R, lam))
lam = lambda1(WarpedMetric.hyperbolic(1.0), StabilityParams(0.1), 5.0)
print(json.dumps({"numba": NUMBA_ENABLED, "zeros": zeros, "lambda1": lam}))
"""


def run_probe(flag):
    env = dict(os.environ, STABILITY_LAB_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True,
                         check=True, timeout=600)
    return json.loads(out.stdout.strip().splitlines()[-1])


@pytest.fixture(scope="module")
def probes():
    return run_probe("1"), run_probe("0")


def test_flag_selects_path(probes):
    jit, pure = probes
    assert pure["numba"] is False
    assert jit["numba"] is NUMBA_ENABLED


def test_paths_agree(probes):
    jit, pure = probes
    for z1, z2 in zip(jit["zeros"], pure["zeros"]):
        if z1 is None:
            assert z2 is None
        else:
            assert z2 == pytest.approx(z1, rel=1e-12)
    assert pure["lambda1"] == pytest.approx(jit["lambda1"], rel=1e-10)


def test_metric_ratios_match_numpy():
    for name in ("euclidean", "hyperbolic:2", "sphere:1", "cone:0.5", "schoen:1"):
        m = WarpedMetric.parse(name)
        args = m.kernel_args()
        for r in (0.1, 0.7, 2.5):
            t, p, d2 = kernels.metric_ratios(*args, r)
            x = np.array([r])
            tau = m.tau(x)[0]
            assert t == pytest.approx(tau, rel=1e-13)
            assert p == pytest.approx(m.dtau_eval(x)[0] / tau, rel=1e-12)
            assert d2 == pytest.approx(m.d2tau_eval(x)[0] / tau, rel=1e-12)


def test_custom_profile_kernel_matches_spline():
    r = np.linspace(0.0, 5.0, 101)
    m = WarpedMetric.from_samples(r, np.sinh(r))
    V = Potential.from_samples(r, 1.0 / (1.0 + r) ** 2)
    args = m.kernel_args() + V.kernel_args()
    for x in (0.3, 1.7, 4.2):
        _, _, q = kernels.coefficients(*args, 0.2, x)
        xa = np.array([x])
        expect = V(xa)[0] + 0.2 * m.d2tau_eval(xa)[0] / m.tau(xa)[0]
        assert q == pytest.approx(expect, rel=1e-10)


def test_shoot_status_codes():
    m = WarpedMetric.hyperbolic(1.0)
    args = m.kernel_args() + Potential.zero().kernel_args()
    status, rz, rlast, n = kernels.shoot(*args, 0.0, 0.0, 1e-3, 1.0, 0.0, 5.0, 1e-10, 1e-12, 1e-10, 10**6)
    assert status == kernels.SHOOT_OK and rlast == 5.0 and n > 0
    status, *_ = kernels.shoot(*args, 0.0, 0.0, 1e-3, 1.0, 0.0, 5.0, 1e-10, 1e-12, 1e-10, 3)
    assert status == kernels.SHOOT_UNDERFLOW
