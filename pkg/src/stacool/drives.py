"""Pulsed drive amplitudes that realize prescribed linearized couplings.

The cavity and mechanical displacements obey

    alpha_i' = (-i Delta_i - 2 i g_i Re beta - kappa_i / 2) alpha_i - i J alpha_j + i Omega_i
    beta'    = (-i omega_m - gamma_m / 2) beta - i g_1 |alpha_1|^2 - i g_2 |alpha_2|^2

and the effective couplings are ``G_i = g_i alpha_i``. Fixing ``alpha_i``
from the coupling schedule makes the first line an algebraic equation for
``Omega_i``; only ``beta`` has to be integrated.

``alpha_2 = G2 / g2`` is real. With the counterdiabatic channel switched on,
``alpha_1 = 1j * theta_dot / g1`` is purely imaginary; otherwise the a1-b
coupling is off and ``alpha_1 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate as spi

from .dynamics.moments import SystemParams
from .errors import ConfigError, DifferentiationError, IntegrationError

__all__ = [
    "DisplacementState",
    "DrivePair",
    "DriveModel",
    "beta_trajectory",
    "reconstruct_drives",
    "drive_functions",
    "forward_displacements",
    "round_trip_error",
    "self_consistency",
]

# sanity bound on reconstructed drive amplitudes (units of omega_m)
MAX_DRIVE = 1e6


@dataclass(frozen=True)
class DisplacementState:
    """Displacement amplitudes on a time grid."""

    t: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    beta: np.ndarray


@dataclass(frozen=True)
class DrivePair:
    """Drive amplitudes on a time grid. ``Omega1`` is ``None`` when ``g1 = 0``."""

    t: np.ndarray
    Omega1: np.ndarray | None
    Omega2: np.ndarray

    def __post_init__(self):
        for name in ("Omega1", "Omega2"):
            v = getattr(self, name)
            if v is None:
                continue
            if not np.all(np.isfinite(v)):
                raise IntegrationError(f"{name} is not finite")
            peak = float(np.max(np.abs(v), initial=0.0))
            if peak > MAX_DRIVE:
                raise IntegrationError(f"{name} peaks at {peak:.3g} omega_m, above {MAX_DRIVE:g}")


class DriveModel:
    """Prescribed displacements and their time derivatives.

    Parameters
    ----------
    sched : CouplingSchedule or None
        Anything with ``J, G2, G1, dG2, dG1`` methods works; ``None`` means
        every coupling is off.
    sys : SystemParams
    derivative : {"analytic", "numeric"}
        How ``alpha_i'`` is obtained. ``"numeric"`` uses fourth-order central
        differences with step ``1e-4 T``.
    """

    def __init__(self, sched, sys: SystemParams, derivative: str = "analytic"):
        if derivative not in ("analytic", "numeric"):
            raise ValueError(f"unknown derivative mode {derivative!r}")
        problems = []
        if sched is not None:
            if sys.g2 == 0:
                problems.append("g2 = 0 but the G2 coupling is on")
            if sys.sta_enabled and sys.g1 == 0:
                problems.append("g1 = 0 but the counterdiabatic G1 coupling is on")
        if problems:
            raise ConfigError(problems)
        if sched is not None and getattr(sched, "check", False):
            # finite differences straddle the window edges
            sched = replace(sched, check=False)
        self.sched = sched
        self.sys = sys
        self.derivative = derivative
        self.has_a1 = sched is not None and sys.sta_enabled

    def J(self, t):
        t = np.asarray(t, dtype=float)
        if self.sched is None:
            return np.zeros(t.shape)
        return np.asarray(self.sched.J(t), dtype=float)

    def alpha(self, t):
        """``(alpha1, alpha2)`` at ``t``."""
        t = np.asarray(t, dtype=float)
        zero = np.zeros(t.shape, dtype=complex)
        if self.sched is None:
            return zero, zero.copy()
        a2 = np.asarray(self.sched.G2(t) / self.sys.g2, dtype=complex)
        a1 = np.asarray(self.sched.G1(t) / self.sys.g1, dtype=complex) if self.has_a1 else zero
        return a1, a2

    def alpha_dot(self, t):
        t = np.asarray(t, dtype=float)
        zero = np.zeros(t.shape, dtype=complex)
        if self.sched is None:
            return zero, zero.copy()
        if self.derivative == "numeric":
            d1, d2 = self._numeric_dot(t)
        else:
            d2 = np.asarray(self.sched.dG2(t) / self.sys.g2, dtype=complex)
            d1 = np.asarray(self.sched.dG1(t) / self.sys.g1, dtype=complex) if self.has_a1 else zero
        if not (np.all(np.isfinite(d1)) and np.all(np.isfinite(d2))):
            raise DifferentiationError("non-finite displacement derivative")
        return d1, d2

    def _numeric_dot(self, t):
        h = 1e-4 * self.sched.protocol.T
        f = [self.alpha(t + k * h) for k in (-2, -1, 1, 2)]
        return tuple((f[0][i] - 8 * f[1][i] + 8 * f[2][i] - f[3][i]) / (12 * h) for i in (0, 1))

    def drive_source(self, t):
        """``g1 |alpha1|^2 + g2 |alpha2|^2``, the force on the mechanics."""
        a1, a2 = self.alpha(t)
        return self.sys.g1 * np.abs(a1) ** 2 + self.sys.g2 * np.abs(a2) ** 2


def _window(sched, window):
    if window is None:
        if sched is None:
            raise ValueError("a window is required when no schedule is given")
        window = (sched.t_start, sched.t_end)
    t0, t1 = map(float, window)
    if not t1 > t0:
        raise ValueError(f"empty window [{t0}, {t1}]")
    return t0, t1


def _solve_beta(model: DriveModel, window, rtol, atol):
    sys = model.sys
    rate = -1j * sys.omega_m - 0.5 * sys.gamma_m

    def rhs(t, y):
        beta = y[0] + 1j * y[1]
        d = rate * beta - 1j * float(model.drive_source(t))
        return [d.real, d.imag]

    t0, t1 = window
    # real form: solve_ivp's step-size control on complex arrays is fine, but
    # the real form keeps dense output cheap and unambiguous
    sol = spi.solve_ivp(rhs, (t0, t1), [0.0, 0.0], method="DOP853", dense_output=True,
                        rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"beta integration failed: {sol.message}")
    return sol.sol


def beta_trajectory(sched, sys: SystemParams, window=None, *, t_eval=None, grid_points=2000,
                    rtol=1e-10, atol=1e-10):
    """Mechanical displacement ``beta(t)`` with ``beta(t_start) = 0``.

    Returns
    -------
    t : ndarray
    beta : ndarray of complex
    """
    model = DriveModel(sched, sys)
    t0, t1 = _window(sched, window)
    dense = _solve_beta(model, (t0, t1), rtol, atol)
    t = np.linspace(t0, t1, grid_points) if t_eval is None else np.asarray(t_eval, dtype=float)
    y = dense(t)
    return t, y[0] + 1j * y[1]


def _omegas(model: DriveModel, t, beta):
    sys = model.sys
    a1, a2 = model.alpha(t)
    d1, d2 = model.alpha_dot(t)
    J = model.J(t)
    rb = np.real(beta)
    om2 = -1j * (d2 + (1j * sys.Delta2 + 2j * sys.g2 * rb + 0.5 * sys.kappa2) * a2 + 1j * J * a1)
    om1 = -1j * (d1 + (1j * sys.Delta1 + 2j * sys.g1 * rb + 0.5 * sys.kappa1) * a1 + 1j * J * a2)
    return om1, om2


def reconstruct_drives(sched, sys: SystemParams, window=None, *, t_eval=None, grid_points=2000,
                       derivative="analytic", rtol=1e-10, atol=1e-10) -> DrivePair:
    """Drive amplitudes ``Omega_1``, ``Omega_2`` realizing the schedule.

    Each ``Omega_i`` is the unique value that makes the prescribed
    ``alpha_i = G_i / g_i`` solve its equation of motion, given ``beta`` and
    the concurrent hopping ``J``. ``Omega1`` is omitted when ``g1 = 0``.

    Raises
    ------
    ConfigError
        A coupling channel is on while its single-photon coupling is zero.
    DifferentiationError
        Non-finite ``alpha_i'``.
    """
    model = DriveModel(sched, sys, derivative)
    t0, t1 = _window(sched, window)
    dense = _solve_beta(model, (t0, t1), rtol, atol)
    t = np.linspace(t0, t1, grid_points) if t_eval is None else np.asarray(t_eval, dtype=float)
    y = dense(t)
    om1, om2 = _omegas(model, t, y[0] + 1j * y[1])
    return DrivePair(t=t, Omega1=None if sys.g1 == 0 else om1, Omega2=om2)


def drive_functions(sched, sys: SystemParams, window=None, *, rtol=1e-10, atol=1e-10):
    """Callables ``Omega1(t)``, ``Omega2(t)`` valid anywhere in the window."""
    model = DriveModel(sched, sys)
    t0, t1 = _window(sched, window)
    dense = _solve_beta(model, (t0, t1), rtol, atol)

    last = [None, None]

    def both(t):
        # forward integrators ask for Omega1 and Omega2 at the same t in a row
        if last[0] is not None and np.array_equal(last[0], t):
            return last[1]
        y = dense(t)
        out = _omegas(model, t, y[0] + 1j * y[1])
        last[0], last[1] = np.copy(t), out
        return out

    return (lambda t: both(t)[0]), (lambda t: both(t)[1])


def forward_displacements(sched, sys: SystemParams, omega1, omega2, window=None, *,
                          t_eval=None, grid_points=2000, rtol=1e-11, atol=1e-9) -> DisplacementState:
    """Integrate the displacement equations for given drives.

    ``omega1`` and ``omega2`` are callables of ``t``. The start values are
    ``alpha_i = G_i / g_i`` and ``beta = 0``.
    """
    model = DriveModel(sched, sys)
    t0, t1 = _window(sched, window)
    a1_0, a2_0 = model.alpha(t0)
    J = model.J

    def rhs(t, y):
        a1 = y[0] + 1j * y[1]
        a2 = y[2] + 1j * y[3]
        beta = y[4] + 1j * y[5]
        rb = beta.real
        Jt = float(J(t))
        da1 = (-1j * sys.Delta1 - 2j * sys.g1 * rb - 0.5 * sys.kappa1) * a1 - 1j * Jt * a2 + 1j * omega1(t)
        da2 = (-1j * sys.Delta2 - 2j * sys.g2 * rb - 0.5 * sys.kappa2) * a2 - 1j * Jt * a1 + 1j * omega2(t)
        db = (-1j * sys.omega_m - 0.5 * sys.gamma_m) * beta - 1j * (
            sys.g1 * abs(a1) ** 2 + sys.g2 * abs(a2) ** 2
        )
        return [da1.real, da1.imag, da2.real, da2.imag, db.real, db.imag]

    y0 = [complex(a1_0).real, complex(a1_0).imag, complex(a2_0).real, complex(a2_0).imag, 0.0, 0.0]
    t = np.linspace(t0, t1, grid_points) if t_eval is None else np.asarray(t_eval, dtype=float)
    sol = spi.solve_ivp(rhs, (t0, t1), y0, method="DOP853", t_eval=t, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"forward displacement integration failed: {sol.message}")
    y = sol.y
    return DisplacementState(t=sol.t, alpha1=y[0] + 1j * y[1], alpha2=y[2] + 1j * y[3],
                             beta=y[4] + 1j * y[5])


def round_trip_error(sched, sys: SystemParams, window=None, grid_points=801) -> dict:
    """Relative sup-norm mismatch between ``g_i alpha_i`` and ``G_i`` after a round trip."""
    om1, om2 = drive_functions(sched, sys, window)
    fwd = forward_displacements(sched, sys, om1, om2, window, grid_points=grid_points)
    model = DriveModel(sched, sys)
    a1, a2 = model.alpha(fwd.t)
    out = {}
    for key, got, want, g in (("G1", fwd.alpha1, a1, sys.g1), ("G2", fwd.alpha2, a2, sys.g2)):
        scale = np.max(np.abs(want)) * g
        if scale == 0:
            out[key] = float(np.max(np.abs(got)) * g)
        else:
            out[key] = float(np.max(np.abs(g * (got - want))) / scale)
    return out


def self_consistency(sched, sys: SystemParams, window=None, grid_points=4001) -> float:
    """``max_t 2 g_i |Re beta| / Delta_i`` over both cavities.

    The linearization assumes the mechanical displacement barely shifts the
    cavity detunings, so this should be small.
    """
    _, beta = beta_trajectory(sched, sys, window, grid_points=grid_points)
    rb = np.max(np.abs(beta.real))
    return float(max(2 * sys.g1 * rb / sys.Delta1, 2 * sys.g2 * rb / sys.Delta2))
