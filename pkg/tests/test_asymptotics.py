import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from stability_lab.asymptotics import (
    C_plus,
    RhoAsymptotics,
    aag_fit,
    asymptotic_ratio,
    delta0_minimizer,
    rho_asymptotics,
    rho_plus,
    rho_tilde,
)
from stability_lab.cutoff import alpha_of
from stability_lab.errors import DegenerateNormalizationError, FitUndefinedError, PreconditionError
from stability_lab.metric import WarpedMetric, disk_area

EUCLID = WarpedMetric.euclidean()


def flat_rho(a, b, delta, s):
    al = alpha_of(a, b)
    A = lambda r1, r2: math.pi * (r2**2 - r1**2)
    scale = s ** (2 * (b + 1))
    w = delta * math.exp(2 * delta) / al * (1 + delta / al) ** (2 * (b - 1))
    return 2 * a * b * al ** (2 * b - 1) * math.exp(2 * al) * (
        A(s * math.exp(-al), s) / scale - w * A(s * math.exp(-s), s * math.exp(-(al + delta))) / scale)


def test_rho_plus_flat_hand_assembled():
    assert rho_plus(EUCLID, 1 / 8, 1.0, 1.0, 100.0) == pytest.approx(flat_rho(1 / 8, 1.0, 1.0, 100.0), rel=1e-10)


def test_rho_plus_small_delta_limit():
    a, b, s = 1 / 8, 1.0, 30.0
    al = alpha_of(a, b)
    lead = 2 * a * b * al ** (2 * b - 1) * math.exp(2 * al) * math.pi * s**2 * (1 - math.exp(-2 * al)) / s ** (2 * (b + 1))
    assert rho_plus(EUCLID, a, b, 1e-9, s) == pytest.approx(lead, rel=1e-7)


def test_rho_plus_schoen_finite():
    val = rho_plus(WarpedMetric.schoen(1.0), 0.25, 1.0, 0.5, 200.0)
    assert math.isfinite(val)


def test_rho_plus_preconditions():
    with pytest.raises(PreconditionError, match="alpha > 0"):
        rho_plus(EUCLID, 0.5, 1.0, 1.0, 10.0)
    with pytest.raises(PreconditionError, match="s > alpha"):
        rho_plus(EUCLID, 1 / 8, 1.0, 1.0, 4.0)


# rho_tilde

def test_rho_tilde_examples():
    assert rho_tilde(1.0, 1.0, 3.0, 1e-9) == pytest.approx(1 - math.exp(-3), abs=1e-7)
    assert rho_tilde(1.0, 1.0, 3.0, 50.0) == pytest.approx(1 - math.exp(-3), abs=1e-15)
    assert rho_tilde(1.0, 1.0, 2.0, 10.0) == pytest.approx(1 - 11 * math.exp(-2), rel=1e-14)
    assert rho_tilde(1.0, 1.0, 2.0, 10.0) < 0


def test_rho_tilde_precondition():
    with pytest.raises(PreconditionError):
        rho_tilde(0.0, 1.0, 3.0, 1.0)


@given(alpha=st.floats(0.1, 5.0), k=st.floats(0.5, 6.0), b=st.floats(1.0, 3.0))
def test_rho_tilde_small_delta(alpha, k, b):
    assert abs(rho_tilde(alpha, b, k, 1e-8) - (1 - math.exp(-k * alpha))) <= 1e-6


@given(alpha=st.floats(0.1, 5.0), k=st.floats(2.1, 6.0), b=st.floats(1.0, 3.0))
def test_rho_tilde_large_delta(alpha, k, b):
    # at delta = 1e3 the tail e^((2-k) delta) (delta/alpha)(1 + delta/alpha)^(2(b-1))
    # is below 1e-6 only once k - 2 exceeds about 0.06
    assert abs(rho_tilde(alpha, b, k, 1e3) - (1 - math.exp(-k * alpha))) <= 1e-6


def test_rho_tilde_large_delta_needs_k_away_from_two():
    al, b, k = 0.55, 1.9, 2.0085
    assert abs(rho_tilde(al, b, k, 1e3) - (1 - math.exp(-k * al))) > 1.0
    assert abs(rho_tilde(al, b, k, 1e5) - (1 - math.exp(-k * al))) <= 1e-6


# delta0

def grid_min(alpha, b, k, n=100_001):
    d = np.linspace(1e-3, 10.0, n)
    x = d / alpha
    v = 1 - math.exp(-k * alpha) * (1 + np.exp((2 - k) * d) * x * (1 + x) ** (2 * (b - 1)))
    return float(v.min()), float(d[v.argmin()])


def test_delta0_interior():
    res = delta0_minimizer(1.0, 1.0, 4.0)
    ref, d_ref = grid_min(1.0, 1.0, 4.0)
    assert not res.boundary_flag
    assert 1e-3 < res.delta0 < 10
    assert res.rho_min < 1 - math.exp(-4)
    assert res.rho_min <= ref + 1e-12
    assert res.delta0 == pytest.approx(d_ref, abs=1e-3)


def test_delta0_boundary_k2():
    res = delta0_minimizer(1.0, 1.0, 2.0)
    assert res.boundary_flag and res.delta0 == 10.0


def test_delta0_large_k():
    res = delta0_minimizer(1.0, 1.0, 60.0)
    assert res.rho_min == pytest.approx(1.0, abs=1e-20)


@settings(max_examples=50)
@given(alpha=st.floats(0.1, 5.0), k=st.floats(2.05, 6.0), b=st.floats(1.0, 3.0))
def test_delta0_against_grid(alpha, k, b):
    res = delta0_minimizer(alpha, b, k)
    ref, _ = grid_min(alpha, b, k)
    # the grid minimum bounds the true minimum from above
    assert res.rho_min <= ref + 1e-6
    assert abs(res.rho_min - ref) <= 1e-6


@given(alpha=st.floats(0.1, 5.0), k=st.floats(0.5, 2.0), b=st.floats(1.0, 3.0))
def test_delta0_flags_k_at_most_two(alpha, k, b):
    assert delta0_minimizer(alpha, b, k).boundary_flag


def test_rho_asymptotics_consistency():
    ra = rho_asymptotics(0.25, 1.0, 3.0, math.pi)
    assert ra.C_plus == C_plus(0.25, 1.0, math.pi)
    for d in np.linspace(1e-3, 10, 200):
        assert ra.rho_min <= rho_tilde(ra.alpha, 1.0, 3.0, d) + 1e-15
    with pytest.raises(ValueError):
        RhoAsymptotics(ra.a, ra.b, ra.alpha, ra.k, ra.C, ra.C_plus * 1.1, ra.delta0, ra.rho_min,
                       ra.bracket, ra.boundary_flag)


# growth fits

def test_aag_fit_euclid():
    fit = aag_fit(EUCLID, (10, 1000))
    assert fit.k_hat == pytest.approx(2, abs=1e-6)
    assert fit.C_hat == pytest.approx(math.pi, abs=1e-6)
    assert fit.power_law


@pytest.mark.parametrize("eps", [0.5, 1.0])
def test_aag_fit_schoen(eps):
    fit = aag_fit(WarpedMetric.schoen(eps), (10, 1000))
    assert fit.k_hat == pytest.approx(2 + eps, abs=0.02)
    assert fit.C_hat == pytest.approx(2 * math.pi / (eps * (1 + eps)), rel=0.02)


def test_aag_fit_residual_envelope():
    m = WarpedMetric.cone(0.5)
    fit = aag_fit(m, (2, 200))
    for s in np.geomspace(2, 200, 7):
        pred = fit.C_hat * s**fit.k_hat
        assert abs(math.log(disk_area(m, s) / pred)) <= 3 * fit.residual + 1e-12


def test_aag_fit_hyperbolic_not_power_law():
    fit = aag_fit(WarpedMetric.hyperbolic(1.0), (5, 40))
    assert not fit.power_law
    assert fit.k_hat > 5
    assert aag_fit(WarpedMetric.hyperbolic(1.0), (4, 40)).k_hat < fit.k_hat


def test_aag_fit_errors():
    with pytest.raises(FitUndefinedError):
        aag_fit(WarpedMetric.sphere(1.0), (0.1, 3.0))
    with pytest.raises(PreconditionError):
        aag_fit(EUCLID, (10, 10))


# ratio

def test_ratio_euclid():
    r = asymptotic_ratio(EUCLID, 1 / 8, 1.0, 1.0, [1e2, 1e3, 1e4])
    assert abs(r[-1] - 1) <= 0.02
    assert np.all(np.diff(np.abs(r - 1)) <= 1e-12)


def test_ratio_schoen():
    r = asymptotic_ratio(WarpedMetric.schoen(0.5), 0.25, 1.0, 0.5, [1e2, 1e3, 1e4])
    assert abs(r[-1] - 1) <= 0.02
    assert np.all(np.diff(np.abs(r - 1)) <= 1e-12)


def test_ratio_degenerate():
    # k = 2, b = 1: rho_tilde has a root in delta; evaluating at it is refused
    from scipy.optimize import brentq

    a = 0.3
    al = alpha_of(a, 1.0)
    root = brentq(lambda d: rho_tilde(al, 1.0, 2.0, d), 1e-3, 50, xtol=1e-15)
    with pytest.raises(DegenerateNormalizationError):
        asymptotic_ratio(EUCLID, a, 1.0, root, [1e2])


def test_rho_plus_decays_at_delta0():
    a, b = 0.25, 1.0
    m = WarpedMetric.schoen(0.5)
    k = m.aag()[0]
    assert 2 * (b + 1) > k
    d0 = delta0_minimizer(alpha_of(a, b), b, k).delta0
    vals = [rho_plus(m, a, b, d0, s) for s in np.geomspace(50, 1e4, 8)]
    assert all(abs(x) > abs(y) for x, y in zip(vals, vals[1:]))
    assert abs(vals[-1]) < 0.1 * abs(vals[0])
