"""Compiled Dormand-Prince 5(4) integrator for the moment equations.

Long adiabatic runs span ~10^4 mechanical periods with counter-rotating
terms oscillating at ``2 omega_m``, i.e. a few 10^5 accepted steps at the
default tolerances. The whole stepping loop, including the coupling
pulses and the reporting-grid interpolation, runs inside numba.

Between accepted steps the solution is reconstructed with cubic Hermite
interpolants built from the endpoint values and derivatives (FSAL gives
the end derivative for free). The first downward crossing of the phonon
number through ``threshold`` is located by bisection on that interpolant.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from ..protocols import _pulse_kernel, _theta_dot_kernel
from .moments import _deriv

# status codes returned by the kernel
OK = 0
STEP_UNDERFLOW = 1
MAX_STEPS = 2
NONFINITE = 3

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
        [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
        [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ]
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# 5th-order minus embedded 4th-order weights
_E = np.array(
    [
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    ]
)

# parameter vector layout passed to the kernel
P_CODE, P_G, P_T, P_XI, P_TF, P_DELTA, P_K1, P_K2, P_GM, P_NBAR, P_WM, P_CR, P_STA = range(13)


@numba.njit(cache=True)
def _rhs(t, y, out, pars):
    code = int(pars[P_CODE])
    if code < 0:
        J = 0.0
        G2 = 0.0
        G1 = 0j
    else:
        J, G2, _, _, _, _ = _pulse_kernel(code, pars[P_G], pars[P_T], pars[P_XI], pars[P_TF], t)
        if pars[P_STA] != 0.0:
            G1 = 1j * _theta_dot_kernel(code, pars[P_G], pars[P_T], pars[P_XI], pars[P_TF], t)
        else:
            G1 = 0j
    _deriv(
        t, y, out, J, G2, G1, pars[P_DELTA], pars[P_K1], pars[P_K2], pars[P_GM],
        pars[P_NBAR], pars[P_WM], pars[P_CR] != 0.0,
    )


@numba.njit(cache=True)
def _hermite(theta, h, y0, f0, y1, f1, k):
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + theta
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    return h00 * y0[k] + h10 * h * f0[k] + h01 * y1[k] + h11 * h * f1[k]


@numba.njit(cache=True)
def _err_norm(y0, y1, err, rtol, atol):
    s = 0.0
    n = y0.shape[0]
    for i in range(n):
        sc = atol + rtol * max(abs(y0[i]), abs(y1[i]))
        r = abs(err[i]) / sc
        s += r * r
    return math.sqrt(s / n)


@numba.njit(cache=True)
def _dopri5(y0, t0, t1, t_eval, pars, rtol, atol, max_steps, threshold, watch):
    n = y0.shape[0]
    n_eval = t_eval.shape[0]
    Y = np.zeros((n_eval, n), dtype=np.complex128)
    K = np.zeros((7, n), dtype=np.complex128)
    ytmp = np.empty(n, dtype=np.complex128)
    y = y0.copy()
    ynew = np.empty(n, dtype=np.complex128)
    err = np.empty(n, dtype=np.complex128)
    fnew = np.empty(n, dtype=np.complex128)
    # stats: n_steps, n_rejected, nfev, t_fail, t_cross, pb_min, t_pb_min,
    #        max_imag_rel, min_number, h_min_used, h_max_used
    stats = np.zeros(11)
    stats[4] = np.nan
    stats[9] = np.inf

    t = t0
    _rhs(t, y, K[0], pars)
    nfev = 1

    # starting step (Hairer & Wanner, II.4)
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d0 += (abs(y[i]) / sc) ** 2
        d1 += (abs(K[0, i]) / sc) ** 2
    d0 = math.sqrt(d0 / n)
    d1 = math.sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h = min(h, abs(t1 - t0))
    for i in range(n):
        ytmp[i] = y[i] + h * K[0, i]
    _rhs(t + h, ytmp, fnew, pars)
    nfev += 1
    d2 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d2 += (abs(fnew[i] - K[0, i]) / sc) ** 2
    d2 = math.sqrt(d2 / n) / h
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    h = min(100.0 * h, h1, abs(t1 - t0))

    ie = 0
    while ie < n_eval and t_eval[ie] <= t0:
        for i in range(n):
            Y[ie, i] = y[i]
        ie += 1

    pb_min = y[watch].real
    t_pb_min = t0
    crossed = y[watch].real < threshold
    if crossed:
        stats[4] = t0
    max_imag = 0.0
    min_number = np.inf
    for k in range(3):
        v = y[k]
        max_imag = max(max_imag, abs(v.imag) / (1.0 + abs(v)))
        min_number = min(min_number, v.real)

    n_steps = 0
    n_rej = 0
    status = OK
    t_fail = np.nan
    h_max_used = 0.0
    while t < t1:
        if n_steps + n_rej >= max_steps:
            status = MAX_STEPS
            t_fail = t
            break
        if h < 1e-14 * max(1.0, abs(t)):
            status = STEP_UNDERFLOW
            t_fail = t
            break
        last = False
        if t + h >= t1:
            h = t1 - t
            last = True
        for s in range(1, 7):
            for i in range(n):
                acc = y[i]
                for j in range(s):
                    if _A[s, j] != 0.0:
                        acc += h * _A[s, j] * K[j, i]
                ytmp[i] = acc
            _rhs(t + _C[s] * h, ytmp, K[s], pars)
        # stage 7 point is the 5th-order solution (FSAL)
        for i in range(n):
            ynew[i] = ytmp[i]
        _rhs(t + h, ynew, fnew, pars)
        nfev += 7
        for i in range(n):
            acc = 0j
            for s in range(6):
                acc += _E[s] * K[s, i]
            acc += _E[6] * fnew[i]
            err[i] = h * acc
        en = _err_norm(y, ynew, err, rtol, atol)
        if not math.isfinite(en):
            status = NONFINITE
            t_fail = t
            break
        if en <= 1.0:
            tn = t1 if last else t + h
            hs = tn - t
            # reporting grid
            while ie < n_eval and t_eval[ie] <= tn:
                th = (t_eval[ie] - t) / hs
                for i in range(n):
                    Y[ie, i] = _hermite(th, hs, y, K[0], ynew, fnew, i)
                pv = Y[ie, watch].real
                if pv < pb_min:
                    pb_min = pv
                    t_pb_min = t_eval[ie]
                ie += 1
            # first downward crossing of the watched number moment
            p0 = y[watch].real
            p1 = ynew[watch].real
            if not crossed and p0 >= threshold and p1 < threshold:
                lo = 0.0
                hi = 1.0
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if _hermite(mid, hs, y, K[0], ynew, fnew, watch).real >= threshold:
                        lo = mid
                    else:
                        hi = mid
                    if (hi - lo) * hs < 1e-12:
                        break
                stats[4] = t + 0.5 * (lo + hi) * hs
                crossed = True
            if p1 < pb_min:
                pb_min = p1
                t_pb_min = tn
            for k in range(3):
                v = ynew[k]
                max_imag = max(max_imag, abs(v.imag) / (1.0 + abs(v)))
                min_number = min(min_number, v.real)
            stats[9] = min(stats[9], hs)
            h_max_used = max(h_max_used, hs)
            t = tn
            for i in range(n):
                y[i] = ynew[i]
                K[0, i] = fnew[i]
            n_steps += 1
            fac = 0.9 * en ** (-0.2) if en > 0.0 else 5.0
            h = hs * min(5.0, max(0.2, fac))
        else:
            n_rej += 1
            fac = 0.9 * en ** (-0.2)
            h = h * min(1.0, max(0.2, fac))

    stats[0] = n_steps
    stats[1] = n_rej
    stats[2] = nfev
    stats[3] = t_fail
    stats[5] = pb_min
    stats[6] = t_pb_min
    stats[7] = max_imag
    stats[8] = min_number
    stats[10] = h_max_used
    return Y, y, status, stats


def run_kernel(y0, t0, t1, t_eval, pars, rtol=1e-9, atol=1e-12, max_steps=50_000_000,
               threshold=1.0, watch=2):
    """Thin typed wrapper around the compiled kernel."""
    return _dopri5(
        np.ascontiguousarray(y0, dtype=np.complex128),
        float(t0),
        float(t1),
        np.ascontiguousarray(t_eval, dtype=np.float64),
        np.ascontiguousarray(pars, dtype=np.float64),
        float(rtol),
        float(atol),
        int(max_steps),
        float(threshold),
        int(watch),
    )
