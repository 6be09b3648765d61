import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from stability_lab.cutoff import (
    AlphaParams,
    CutoffSpec,
    F_profile,
    F_raw,
    F_weighted,
    G_term,
    alpha_of,
    eval_cutoff,
    f_minus_at_epsilon,
    interval_bounds_check,
)
from stability_lab.errors import PreconditionError
from stability_lab.metric import StepProfile


def fd(fun, r, h=1e-6):
    return (fun(r + h) - fun(r - h)) / (2 * h)


# eval_cutoff

def test_log_power_plateau_junction():
    s = 3.0
    v = eval_cutoff(CutoffSpec.log_power(s, 2.0), s * math.exp(-s))
    assert v.f == pytest.approx(1.0, abs=1e-12)
    assert v.at_breakpoint


def test_log_power_values():
    spec = CutoffSpec.log_power(5.0, 1.0)
    v = eval_cutoff(spec, 1.0)
    assert v.f == pytest.approx(math.log(5) / 5, rel=1e-14)
    assert v.df == pytest.approx(-0.2, rel=1e-14)
    assert v.df == pytest.approx(fd(lambda x: spec.f(np.array([x]))[0], 1.0), rel=1e-6)


def test_linear_values():
    v = eval_cutoff(CutoffSpec.linear(4.0), 1.0)
    assert (v.f, v.df, v.d2f) == (0.75, -0.25, 0.0)


def test_eval_outside_support():
    with pytest.raises(ValueError):
        eval_cutoff(CutoffSpec.linear(4.0), 5.0)


def test_b_below_one_rejected():
    with pytest.raises(PreconditionError):
        CutoffSpec.log_power(5.0, 0.5)
    with pytest.raises(PreconditionError):
        AlphaParams(0.2, 0.9, 1.0)


def test_huber_ordering():
    with pytest.raises(ValueError):
        CutoffSpec.huber(1.0, 3.0, 10.0, 10.0)
    with pytest.raises(ValueError):
        CutoffSpec.huber(2.5, 3.0, 5.0, 10.0)
    spec = CutoffSpec.huber(1.0, 3.0, 5.0, 10.0)
    f = spec.f(np.array([1.5, 2.5, 3.0, 4.0, 7.5, 10.0, 11.0]))
    assert np.allclose(f, [0.0, 0.5, 1.0, 1.0, 0.5, 0.0, 0.0])


@given(s=st.floats(1.5, 50.0), b=st.floats(1.0, 3.0), u=st.floats(0.01, 0.99))
def test_log_power_derivative_matches_difference(s, b, u):
    spec = CutoffSpec.log_power(s, b)
    eps = spec.epsilon
    r = math.exp(math.log(eps) + u * (math.log(s) - math.log(eps)))
    h = 1e-6 * r
    assume(r - h > eps and r + h < s)
    f = lambda x: spec.f(np.array([x]))[0]
    exact = spec.df(np.array([r]))[0]
    g = math.log(s / r) / s
    assert exact == pytest.approx(-(b / (s * r)) * g ** (b - 1.0), rel=1e-12)
    assert (f(r + h) - f(r - h)) / (2 * h) == pytest.approx(exact, rel=1e-6)


# f'(eps)

def test_f_minus_examples():
    assert f_minus_at_epsilon(CutoffSpec.log_power(3.0, 1.0)) == pytest.approx(-1 / (9 * math.exp(-3)), rel=1e-14)
    assert f_minus_at_epsilon(CutoffSpec.log_power(3.0, 1.0)) == pytest.approx(-2.231, abs=1e-3)
    assert f_minus_at_epsilon(CutoffSpec.log_power(3.0, 2.0)) == pytest.approx(-2 / (9 * math.exp(-3)), rel=1e-14)
    assert f_minus_at_epsilon(CutoffSpec.linear(4.0)) == -0.25


def test_f_minus_is_right_limit():
    spec = CutoffSpec.log_power(4.0, 1.5)
    eps = spec.epsilon
    near = spec.df(np.array([eps * (1 + 1e-9)]))[0]
    assert near == pytest.approx(f_minus_at_epsilon(spec), rel=1e-8)


# F

def test_F_linear_constant():
    a, s = 0.3, 4.0
    r = np.linspace(0.1, 3.9, 7)
    assert np.allclose(F_profile(CutoffSpec.linear(s), a, r), (1 - 2 * a) / s**2)


def test_F_quarter_log_power():
    s = 6.0
    r = np.geomspace(s * math.exp(-s) * 1.01, s * 0.99, 9)
    expect = (1 / (2 * s**2 * r**2)) * (1 - np.log(s / r))
    assert np.allclose(F_profile(CutoffSpec.log_power(s, 1.0), 0.25, r), expect, rtol=1e-12)


def test_F_root_at_alpha_radius():
    s, a = 10.0, 1 / 8
    r = s * math.exp(-alpha_of(a, 1.0))
    assert abs(F_profile(CutoffSpec.log_power(s, 1.0), a, np.array([r]))[0]) <= 1e-10


@given(a=st.floats(1e-3, 0.5), b=st.floats(1.0, 3.0), s=st.floats(1.5, 40.0), u=st.floats(0.001, 0.999))
def test_F_closed_form_matches_definition(a, b, s, u):
    spec = CutoffSpec.log_power(s, b)
    eps = spec.epsilon
    r = np.array([math.exp(math.log(eps) + u * (math.log(s) - math.log(eps)))])
    raw = F_raw(spec, a, r)[0]
    closed = F_profile(spec, a, r)[0]
    assume(np.isfinite(raw) and np.isfinite(closed))
    assert closed == pytest.approx(raw, rel=1e-8, abs=1e-300)


@given(a=st.floats(0.01, 0.5), b=st.floats(1.0, 3.0), s=st.floats(0.5, 60.0))
def test_F_root_property(a, b, s):
    al = alpha_of(a, b)
    assume(al > 0 and al < s)
    r = np.array([s * math.exp(-al)])
    scale = 2 * a * b / (s * r[0]) ** 2
    assert abs(F_profile(CutoffSpec.log_power(s, b), a, r)[0]) <= 1e-10 * max(1.0, scale)


def test_F_weighted_survives_tiny_radius():
    s, b, a = 300.0, 2.0, 0.2
    spec = CutoffSpec.log_power(s, b)
    r = np.array([spec.epsilon * 1.5])
    val = F_weighted(spec, a, r, r)
    assert np.isfinite(val[0])
    # moderate radius: agrees with the unweighted closed form
    r = np.array([10.0])
    assert F_weighted(spec, a, r, r)[0] == pytest.approx(F_profile(spec, a, r)[0] * 10.0, rel=1e-14)


# interval bounds

def test_interval_bounds_examples():
    p = AlphaParams(1 / 8, 1.0, 1.0)
    rep = interval_bounds_check(CutoffSpec.log_power(10.0, 1.0), p, 10.0)
    assert p.alpha == 3.0
    assert rep.holds
    assert rep.bounds[1] == 0.0 and rep.worst_slack[1] >= 0
    p = AlphaParams(0.25, 2.0, 0.5)
    assert interval_bounds_check(CutoffSpec.log_power(6.0, 2.0), p, 6.0).holds


def test_interval_bounds_precondition():
    p = AlphaParams(1 / 8, 1.0, 1.0)
    with pytest.raises(PreconditionError, match="s > alpha"):
        interval_bounds_check(CutoffSpec.log_power(3.5, 1.0), p, 3.5)


def test_alpha_zero_precondition():
    p = AlphaParams(0.5, 1.0, 0.5)
    assert p.alpha == 0.0
    with pytest.raises(PreconditionError, match="alpha > 0"):
        p.check(10.0)


def test_alpha_mismatch_rejected():
    with pytest.raises(ValueError):
        AlphaParams(0.25, 1.0, 0.5, alpha=2.0)


@given(a=st.floats(0.02, 0.5), b=st.floats(1.0, 3.0), delta=st.floats(0.05, 3.0), extra=st.floats(0.1, 30.0))
def test_interval_bounds_property(a, b, delta, extra):
    p = AlphaParams(a, b, delta)
    assume(0 < p.alpha < 40)
    s = p.alpha + delta + extra
    (i1, i2, i3) = p.intervals(s)
    assert i1[0] <= i1[1] == i2[0] <= i2[1] == i3[0] <= i3[1] == s
    assert interval_bounds_check(CutoffSpec.log_power(s, b), p, s).holds


# G

def test_G_examples():
    for spec in (CutoffSpec.linear(4.0), CutoffSpec.log_power(5.0, 2.0), CutoffSpec.power(3.0, 1.5)):
        assert G_term(spec) == pytest.approx(1.0, abs=1e-12)
        assert G_term(spec, StepProfile((), (0,))) == 0.0
    s, s0, M = 10.0, 3.0, 4
    G = G_term(CutoffSpec.linear(s), StepProfile((s0,), (1, -M)))
    assert G == pytest.approx(1 - (M + 1) * (1 - s0 / s) ** 2, rel=1e-12)


def test_G_rejects_chi_above_one():
    with pytest.raises(PreconditionError):
        G_term(CutoffSpec.linear(2.0), StepProfile((1.0,), (1, 2)))


@given(
    breaks=st.lists(st.floats(0.1, 9.9), min_size=1, max_size=4, unique=True),
    values=st.lists(st.integers(-5, 1), min_size=5, max_size=5),
    fam=st.sampled_from(["linear", "log_power", "power"]),
)
def test_G_at_most_one(breaks, values, fam):
    breaks = sorted(breaks)
    assume(all(b2 - b1 > 1e-6 for b1, b2 in zip(breaks, breaks[1:])))
    chi = StepProfile(breaks, values[: len(breaks) + 1])
    spec = {"linear": CutoffSpec.linear(10.0), "log_power": CutoffSpec.log_power(10.0, 2.0),
            "power": CutoffSpec.power(10.0, 2.0)}[fam]
    assert G_term(spec, chi) <= 1 + 1e-10


# shape invariants

@given(s=st.floats(1.0, 40.0), b=st.floats(1.0, 3.0), fam=st.sampled_from(["linear", "log_power", "power"]))
def test_shape_invariants(s, b, fam):
    spec = {"linear": CutoffSpec.linear(s), "log_power": CutoffSpec.log_power(s, b),
            "power": CutoffSpec.power(s, b)}[fam]
    r = np.linspace(0.0, 1.2 * s, 2001)
    f, df, _ = spec.derivatives(r)
    assert np.all(f >= 0) and np.all(f <= 1 + 1e-15)
    assert np.all(df <= 0)
    assert np.all(f[r <= spec.epsilon] == 1.0)
    assert np.all(f[r >= s] == 0.0)
    # continuity across the junctions
    for x in spec.breakpoints:
        left = spec.f(np.array([x * (1 - 1e-13)]))[0]
        right = spec.f(np.array([x]))[0]
        assert abs(left - right) <= 1e-12 * max(1.0, 1.0 / max(s, 1.0)) + 1e-10
