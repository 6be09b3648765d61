"""Hot loops of the radial shooting method.

The radial reduction of ``(L + lam) u = 0`` on a rotational metric is

    u'' + p(r) u' + (q(r) + lam) u = 0,   p = tau'/tau,  q = V - a K,

integrated here with the Dormand-Prince 5(4) pair and its quartic dense
output, which locates the first sign change of ``u`` by bisection.  Every
function is numba-compatible; ``_accel.njit`` compiles it unless
``STABILITY_LAB_NUMBA=0``.
"""

import math

import numpy as np

from ._accel import njit

SHOOT_OK = 0
SHOOT_ZERO = 1
SHOOT_UNDERFLOW = 2
SHOOT_DEGENERATE = 3

RESCALE = 1e150

# Dormand-Prince tableau (c, a, b, error weights) and dense-output matrix
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@njit
def pp_eval(x, c, r):
    """Value, first and second derivative of a scipy-style cubic PPoly."""
    n = x.size
    i = np.searchsorted(x, r, side="right") - 1
    if i < 0:
        i = 0
    if i > n - 2:
        i = n - 2
    dx = r - x[i]
    c0 = c[0, i]
    c1 = c[1, i]
    c2 = c[2, i]
    c3 = c[3, i]
    v = ((c0 * dx + c1) * dx + c2) * dx + c3
    d1 = (3.0 * c0 * dx + 2.0 * c1) * dx + c2
    d2 = 6.0 * c0 * dx + 2.0 * c1
    return v, d1, d2


@njit
def metric_ratios(code, par, mx, mc, r):
    """``(tau, tau'/tau, tau''/tau)``; ratios use overflow-free closed forms."""
    if code == 0:
        return r, 1.0 / r, 0.0
    if code == 1:
        k = math.sqrt(par[0])
        t = math.sinh(k * r) / k if k * r < 700.0 else math.inf
        return t, k / math.tanh(k * r), k * k
    if code == 2:
        k = math.sqrt(par[0])
        return math.sin(k * r) / k, k / math.tan(k * r), -k * k
    if code == 3:
        return par[0] * r, 1.0 / r, 0.0
    if code == 4:
        e = par[0]
        return (2.0 + e) / (e * (1.0 + e)) * r ** (1.0 + e), (1.0 + e) / r, (1.0 + e) * e / (r * r)
    t, d1, d2 = pp_eval(mx, mc, r)
    return t, d1 / t, d2 / t


@njit
def potential_eval(code, par, vx, vc, r):
    if code == 0:
        return 0.0
    if code == 1:
        return par[0]
    if code == 2:
        return par[0] / (1.0 + r) ** par[1]
    v, d1, d2 = pp_eval(vx, vc, r)
    return max(v, 0.0)


@njit
def coefficients(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, r):
    """``(tau, p, q)`` with ``p = tau'/tau`` and ``q = V - a K = V + a tau''/tau``."""
    t, p, d2 = metric_ratios(mcode, mpar, mx, mc, r)
    q = potential_eval(vcode, vpar, vx, vc, r) + a * d2
    return t, p, q


@njit
def _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r, u, du):
    t, p, q = coefficients(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, r)
    return du, -p * du - (q + lam) * u, t


@njit
def _dense_u(u, h, k0, theta):
    # first component of the quartic continuous extension
    acc = 0.0
    for j in range(7):
        poly = 0.0
        tp = theta
        for m in range(4):
            poly += _P[j, m] * tp
            tp *= theta
        acc += k0[j] * poly
    return u + h * acc


@njit
def shoot(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam,
          r0, u0, du0, r_end, rtol, atol, zero_tol, max_steps):
    """Integrate from ``r0`` to ``r_end``; stop at the first zero of ``u``.

    Returns ``(status, r_zero, r_last, n_steps)`` with ``status`` one of the
    ``SHOOT_*`` codes.
    """
    k0 = np.zeros(7)
    k1 = np.zeros(7)
    r = r0
    y0 = u0
    y1 = du0
    f0, f1, t = _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r, y0, y1)
    if not t > 1e-300:
        return SHOOT_DEGENERATE, math.nan, r, 0

    # Hairer's starting step heuristic
    s0 = atol + rtol * abs(y0)
    s1 = atol + rtol * abs(y1)
    d0 = math.sqrt(0.5 * ((y0 / s0) ** 2 + (y1 / s1) ** 2))
    d1 = math.sqrt(0.5 * ((f0 / s0) ** 2 + (f1 / s1) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h = min(h, r_end - r0, max(r0, 1e-6))
    g0, g1, t = _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r + h, y0 + h * f0, y1 + h * f1)
    d2 = math.sqrt(0.5 * (((g0 - f0) / s0) ** 2 + ((g1 - f1) / s1) ** 2)) / h
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    h = min(100.0 * h, h1, r_end - r0)

    n = 0
    while r < r_end:
        if n >= max_steps:
            return SHOOT_UNDERFLOW, math.nan, r, n
        # h below a few ulps of r cannot advance the solution
        if h < 1e-15 * abs(r):
            return SHOOT_UNDERFLOW, math.nan, r, n
        last = False
        if r + h >= r_end:
            h = r_end - r
            last = True

        k0[0] = f0
        k1[0] = f1
        k0[1], k1[1], t = _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r + _C2 * h,
                               y0 + h * (_A21 * k0[0]),
                               y1 + h * (_A21 * k1[0]))
        k0[2], k1[2], t = _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r + _C3 * h,
                               y0 + h * (_A31 * k0[0] + _A32 * k0[1]),
                               y1 + h * (_A31 * k1[0] + _A32 * k1[1]))
        k0[3], k1[3], t = _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r + _C4 * h,
                               y0 + h * (_A41 * k0[0] + _A42 * k0[1] + _A43 * k0[2]),
                               y1 + h * (_A41 * k1[0] + _A42 * k1[1] + _A43 * k1[2]))
        k0[4], k1[4], t = _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r + _C5 * h,
                               y0 + h * (_A51 * k0[0] + _A52 * k0[1] + _A53 * k0[2] + _A54 * k0[3]),
                               y1 + h * (_A51 * k1[0] + _A52 * k1[1] + _A53 * k1[2] + _A54 * k1[3]))
        k0[5], k1[5], t = _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r + h,
                               y0 + h * (_A61 * k0[0] + _A62 * k0[1] + _A63 * k0[2]
                                         + _A64 * k0[3] + _A65 * k0[4]),
                               y1 + h * (_A61 * k1[0] + _A62 * k1[1] + _A63 * k1[2]
                                         + _A64 * k1[3] + _A65 * k1[4]))
        n0 = y0 + h * (_B1 * k0[0] + _B3 * k0[2] + _B4 * k0[3] + _B5 * k0[4] + _B6 * k0[5])
        n1 = y1 + h * (_B1 * k1[0] + _B3 * k1[2] + _B4 * k1[3] + _B5 * k1[4] + _B6 * k1[5])
        k0[6], k1[6], t = _rhs(mcode, mpar, mx, mc, vcode, vpar, vx, vc, a, lam, r + h, n0, n1)
        if not t > 1e-300:
            return SHOOT_DEGENERATE, math.nan, r, n

        e0 = 0.0
        e1 = 0.0
        for j in range(7):
            e0 += _E[j] * k0[j]
            e1 += _E[j] * k1[j]
        e0 *= h
        e1 *= h
        sc0 = atol + rtol * max(abs(y0), abs(n0))
        sc1 = atol + rtol * max(abs(y1), abs(n1))
        err = math.sqrt(0.5 * ((e0 / sc0) ** 2 + (e1 / sc1) ** 2))
        if not err == err:
            h *= 0.2
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        n += 1
        if n0 <= 0.0 < y0:
            lo = 0.0
            hi = 1.0
            while (hi - lo) * h > zero_tol:
                mid = 0.5 * (lo + hi)
                if _dense_u(y0, h, k0, mid) > 0.0:
                    lo = mid
                else:
                    hi = mid
            return SHOOT_ZERO, r + 0.5 * (lo + hi) * h, r + h, n

        r = r_end if last else r + h
        y0 = n0
        y1 = n1
        f0 = k0[6]
        f1 = k1[6]
        if abs(y0) > RESCALE or abs(y1) > RESCALE:
            # the equation is linear: rescaling keeps zeros and avoids overflow
            y0 /= RESCALE
            y1 /= RESCALE
            f0 /= RESCALE
            f1 /= RESCALE
        if err == 0.0:
            fac = 10.0
        else:
            fac = min(10.0, max(0.2, 0.9 * err ** -0.2))
        h *= fac
    return SHOOT_OK, math.nan, r, n
