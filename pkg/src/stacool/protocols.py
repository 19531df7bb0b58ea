"""Closed-form coupling protocols for the loop-coupled three-mode system.

Four pulse families drive the photon hopping ``J(t)`` and the linearized
optomechanical coupling ``G2(t)`` in counterintuitive order (``J`` first).
Everything here is a pure function of ``(params, t)``.

Angles
------
``theta = atan2(J, G2)`` is the dark-state mixing angle (pi/2 -> 0 over a
passage), ``phi`` the bright-state mixing angle, ``g0 = hypot(J, G2)``.

The scalar kernels are compiled with numba so the moment integrator can
call them from inside its own compiled loop.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numba
import numpy as np
from scipy import optimize

from .errors import ConfigError, DomainError, SingularityError

__all__ = [
    "Family",
    "ProtocolParams",
    "AngleSample",
    "pulse_pair",
    "pulse_derivatives",
    "mixing_theta",
    "theta_dot",
    "theta_ddot",
    "phi_angles",
    "adiabatic_ratio",
    "window_defaults",
    "end_of_pulse",
    "coupling_ratio",
]

# relative slack when checking that t lies in the simulation window
_WINDOW_SLACK = 1e-9
# Vitanov pulses are centred on exp(10) in the exponential time variable
_VITANOV_SHIFT = 10.0


class Family(enum.Enum):
    GAUSSIAN = "gaussian"
    SIN4 = "sin4"
    INVSQRT = "invsqrt"
    VITANOV = "vitanov"

    @property
    def code(self) -> int:
        return _FAMILY_CODES[self]

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "gaussian": cls.GAUSSIAN,
            "gauss": cls.GAUSSIAN,
            "sin4": cls.SIN4,
            "invsqrt": cls.INVSQRT,
            "isqrt": cls.INVSQRT,
            "vitanov": cls.VITANOV,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ConfigError(f"unknown protocol family {value!r}") from None


_FAMILY_CODES = {Family.GAUSSIAN: 0, Family.SIN4: 1, Family.INVSQRT: 2, Family.VITANOV: 3}


def window_defaults(family, T, xi=None, t_f=None):
    """Default simulation window ``(t_start, t_end)`` for a family.

    Gaussian and inverse-sqrt pulses are symmetric about ``t_f`` so the
    window is ``[0, 2 t_f]``; sin^4 stops before ``J`` leaves its first
    lobe at ``T - xi``; Vitanov pulses have settled by ``20 T``.
    """
    family = Family.parse(family)
    if family is Family.GAUSSIAN:
        return 0.0, 2.0 * t_f
    if family is Family.SIN4:
        return 0.0, T - xi
    if family is Family.INVSQRT:
        return 0.0, 2.0 * t_f
    return 0.0, 20.0 * T


@dataclass(frozen=True)
class ProtocolParams:
    """Pulse family, shape parameters and simulation window.

    All times are in units of ``1/omega_m`` and ``g`` in units of
    ``omega_m``. ``xi`` is only used by Gaussian and sin^4 pulses and
    ``t_f`` only by Gaussian and inverse-sqrt pulses.
    """

    family: Family
    g: float
    T: float
    xi: float = 0.0
    t_f: float = 0.0
    t_start: float = 0.0
    t_end: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        problems = self.violations()
        if problems:
            raise ConfigError(problems)

    @classmethod
    def create(cls, family, g=0.1, T=1.0, xi=None, t_f=None, t_start=None, t_end=None):
        """Build params, filling ``xi``, ``t_f`` and the window with defaults.

        Defaults: ``xi = 0.8 T`` (Gaussian) or ``0.5 T`` (sin^4);
        ``t_f = 3 T`` (Gaussian) or ``20 T`` (inverse-sqrt).
        """
        family = Family.parse(family)
        if xi is None:
            xi = {Family.GAUSSIAN: 0.8 * T, Family.SIN4: 0.5 * T}.get(family, 0.0)
        if t_f is None:
            t_f = {Family.GAUSSIAN: 3.0 * T, Family.INVSQRT: 20.0 * T}.get(family, 0.0)
        w0, w1 = window_defaults(family, T, xi, t_f)
        return cls(
            family=family,
            g=float(g),
            T=float(T),
            xi=float(xi),
            t_f=float(t_f),
            t_start=float(w0 if t_start is None else t_start),
            t_end=float(w1 if t_end is None else t_end),
        )

    def with_window(self, t_start=None, t_end=None) -> "ProtocolParams":
        return replace(
            self,
            t_start=self.t_start if t_start is None else float(t_start),
            t_end=self.t_end if t_end is None else float(t_end),
        )

    def violations(self) -> list[str]:
        out = []
        if not self.g > 0:
            out.append(f"g must be > 0 (got {self.g})")
        if not self.T > 0:
            out.append(f"T must be > 0 (got {self.T})")
        if not self.t_start >= 0:
            out.append(f"t_start must be >= 0 (got {self.t_start})")
        if not self.t_end > self.t_start:
            out.append(f"t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        if self.family is Family.GAUSSIAN and not self.xi > 0:
            out.append(f"gaussian pulses need xi > 0 (got {self.xi})")
        if self.family is Family.SIN4:
            if not 0 < self.xi < self.T:
                out.append(f"sin4 pulses need 0 < xi < T (got xi={self.xi}, T={self.T})")
            elif self.t_end > self.T - self.xi + _WINDOW_SLACK * self.T:
                out.append(f"sin4 window must end by T - xi = {self.T - self.xi:g} (got {self.t_end:g})")
        if out:
            return out
        r0 = coupling_ratio(self, self.t_start)
        r1 = coupling_ratio(self, self.t_end)
        if not r0 >= 1e3:
            out.append(f"J/G2 at t_start is {r0:.3g}; counterintuitive ordering needs >= 1e3")
        if not r1 <= 1e-2:
            out.append(f"J/G2 at t_end is {r1:.3g}; counterintuitive ordering needs <= 1e-2")
        return out

    def grid(self, n: int = 2000) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, n)


@dataclass(frozen=True)
class AngleSample:
    """Couplings and mixing angles at one instant."""

    t: float
    J: float
    G2: float
    g0: float
    theta: float
    theta_dot: float
    phi: float
    phi_dot: float
    R: float


# --------------------------------------------------------------------------
# compiled scalar kernels


@numba.njit(cache=True)
def _pulse_kernel(code, g, T, xi, tf, t):
    """Return ``(J, G2, dJ, dG2, ddJ, ddG2)`` at time ``t``."""
    if code == 0:
        u = (t - tf + xi) / T
        v = (t - tf - xi) / T
        J = g * math.exp(-u * u)
        G = g * math.exp(-v * v)
        dJ = -2.0 * u / T * J
        dG = -2.0 * v / T * G
        ddJ = (4.0 * u * u - 2.0) / (T * T) * J
        ddG = (4.0 * v * v - 2.0) / (T * T) * G
    elif code == 1:
        w = math.pi / T
        s1 = math.sin(w * (t + xi))
        c1 = math.cos(w * (t + xi))
        s2 = math.sin(w * t)
        c2 = math.cos(w * t)
        J = g * s1**4
        G = g * s2**4
        dJ = 4.0 * g * w * s1**3 * c1
        dG = 4.0 * g * w * s2**3 * c2
        ddJ = g * w * w * (12.0 * s1 * s1 * c1 * c1 - 4.0 * s1**4)
        ddG = g * w * w * (12.0 * s2 * s2 * c2 * c2 - 4.0 * s2**4)
    elif code == 2:
        x = (t - tf) / T
        # p = 1/(1+e^x), q = 1/(1+e^-x): J = g sqrt(p), G = g sqrt(q)
        p = 1.0 / (1.0 + math.exp(x))
        q = 1.0 / (1.0 + math.exp(-x))
        J = g * math.sqrt(p)
        G = g * math.sqrt(q)
        # dp/dt = -p q / T, dq/dt = p q / T
        dJ = -0.5 * J * q / T
        dG = 0.5 * G * p / T
        ddJ = J / (T * T) * (0.25 * q * q - 0.5 * q * p)
        ddG = G / (T * T) * (0.25 * p * p - 0.5 * p * q)
    else:
        # a = (pi/2) q with q = u/(u + e^10), u = e^(t/T)
        q = 1.0 / (1.0 + math.exp(_VITANOV_SHIFT - t / T))
        qc = 1.0 / (1.0 + math.exp(t / T - _VITANOV_SHIFT))
        da = 0.5 * math.pi * q * qc / T
        dda = 0.5 * math.pi * q * qc * (qc - q) / (T * T)
        ca = math.sin(0.5 * math.pi * qc)
        sa = math.sin(0.5 * math.pi * q)
        J = g * ca
        G = g * sa
        dJ = -g * sa * da
        dG = g * ca * da
        ddJ = -g * (ca * da * da + sa * dda)
        ddG = g * (-sa * da * da + ca * dda)
    return J, G, dJ, dG, ddJ, ddG


@numba.njit(cache=True)
def _theta_dot_kernel(code, g, T, xi, tf, t):
    """Closed-form rate of the mixing angle for each family."""
    if code == 0:
        return -2.0 * xi / (T * T * math.cosh(4.0 * xi * (t - tf) / (T * T)))
    if code == 1:
        s = math.sin(math.pi * t / T)
        s1 = math.sin(math.pi * (t + xi) / T)
        den = s**8 + s1**8
        if den == 0.0:
            return 0.0
        return -4.0 * math.pi / T * math.sin(math.pi * xi / T) * s**3 * s1**3 / den
    if code == 2:
        return -1.0 / (4.0 * T * math.cosh((t - tf) / (2.0 * T)))
    q = 1.0 / (1.0 + math.exp(_VITANOV_SHIFT - t / T))
    qc = 1.0 / (1.0 + math.exp(t / T - _VITANOV_SHIFT))
    return -0.5 * math.pi * q * qc / T


@numba.njit(cache=True)
def _theta_ddot_kernel(code, g, T, xi, tf, t):
    J, G, dJ, dG, ddJ, ddG = _pulse_kernel(code, g, T, xi, tf, t)
    s = J * J + G * G
    if s == 0.0:
        return math.nan
    num = dJ * G - J * dG
    return ((ddJ * G - J * ddG) * s - num * 2.0 * (J * dJ + G * dG)) / (s * s)


@numba.njit(cache=True)
def _pulse_table(code, g, T, xi, tf, ts):
    n = ts.shape[0]
    out = np.empty((8, n))
    for i in range(n):
        J, G, dJ, dG, ddJ, ddG = _pulse_kernel(code, g, T, xi, tf, ts[i])
        out[0, i] = J
        out[1, i] = G
        out[2, i] = dJ
        out[3, i] = dG
        out[4, i] = ddJ
        out[5, i] = ddG
        out[6, i] = _theta_dot_kernel(code, g, T, xi, tf, ts[i])
        out[7, i] = _theta_ddot_kernel(code, g, T, xi, tf, ts[i])
    return out


# --------------------------------------------------------------------------
# public evaluators


def _times(p: ProtocolParams, t, check=True):
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if check:
        slack = _WINDOW_SLACK * (p.t_end - p.t_start)
        bad = (ts < p.t_start - slack) | (ts > p.t_end + slack) | ~np.isfinite(ts)
        if bad.any():
            raise DomainError(
                f"t = {ts[bad][0]:.6g} outside the window [{p.t_start:g}, {p.t_end:g}]"
            )
    return ts


def _table(p: ProtocolParams, t, check=True):
    ts = _times(p, t, check)
    return _pulse_table(p.family.code, p.g, p.T, p.xi, p.t_f, np.ascontiguousarray(ts))


def _shape(t, arr):
    return arr if np.ndim(t) else arr[0]


def pulse_pair(p: ProtocolParams, t, check=True):
    """Couplings ``(J, G2)`` at ``t`` (scalar or array).

    Parameters
    ----------
    p : ProtocolParams
    t : float or array_like
        Times inside ``[p.t_start, p.t_end]``.
    check : bool
        Raise :class:`DomainError` for times outside the window.
    """
    tab = _table(p, t, check)
    return _shape(t, tab[0]), _shape(t, tab[1])


def pulse_derivatives(p: ProtocolParams, t, check=True):
    """Closed-form ``(dJ/dt, dG2/dt, d2J/dt2, d2G2/dt2)``."""
    tab = _table(p, t, check)
    return tuple(_shape(t, tab[k]) for k in (2, 3, 4, 5))


def coupling_ratio(p: ProtocolParams, t):
    """``J/G2`` with ``inf`` where ``G2`` vanishes."""
    J, G = pulse_pair(p, t, check=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.divide(J, G)


def mixing_theta(p: ProtocolParams, t, check=True):
    """Dark-state mixing angle ``atan2(J, G2)`` in ``[0, pi/2]``."""
    J, G = pulse_pair(p, t, check)
    return np.arctan2(J, G)


def theta_dot(p: ProtocolParams, t, check=True):
    """Closed-form rate of the mixing angle (always <= 0)."""
    tab = _table(p, t, check)
    return _shape(t, tab[6])


def theta_ddot(p: ProtocolParams, t, check=True):
    """Second derivative of the mixing angle from closed-form pulse derivatives."""
    tab = _table(p, t, check)
    return _shape(t, tab[7])


def _phi_from(J, G, dJ, dG, delta):
    g0 = np.hypot(J, G)
    if np.any(g0 == 0):
        raise SingularityError("phi is undefined where both couplings vanish (g0 = 0)")
    # root + delta/2, evaluated without cancellation for delta < 0
    a = np.sqrt(0.25 * delta * delta + g0 * g0) + 0.5 * abs(delta)
    phi = np.arctan2(g0, a) if delta >= 0 else np.arctan2(a, g0)
    phi_dot = (dJ * J + dG * G) * delta / ((delta * delta + 4.0 * g0 * g0) * g0)
    return phi, phi_dot


def phi_angles(p: ProtocolParams, t, delta: float, check=True):
    """Bright-state mixing angle ``phi`` and its rate at detuning ``delta``.

    ``tan(phi) = g0 / (sqrt(delta^2/4 + g0^2) + delta/2)``, so ``phi = pi/4``
    on resonance and ``phi -> 0`` for large positive detuning.

    Raises
    ------
    SingularityError
        If ``J`` and ``G2`` both vanish.
    """
    tab = _table(p, t, check)
    phi, phi_dot = _phi_from(tab[0], tab[1], tab[2], tab[3], delta)
    return _shape(t, phi), _shape(t, phi_dot)


def adiabatic_ratio(p: ProtocolParams, t, delta: float, check=True):
    """Worst-branch adiabaticity parameter ``|theta_dot| / |delta/2 +- root|``.

    The smaller of the two denominators is ``root - |delta|/2`` with
    ``root = sqrt(delta^2/4 + g0^2)``.
    """
    tab = _table(p, t, check)
    g0 = np.hypot(tab[0], tab[1])
    root = np.sqrt(0.25 * delta * delta + g0 * g0)
    # root - |delta|/2 cancels badly when g0 << delta
    den = g0 * g0 / (root + 0.5 * abs(delta))
    if np.any(den == 0):
        raise SingularityError("adiabatic ratio is singular where g0 = 0")
    return _shape(t, np.abs(tab[6]) / den)


def angle_sample(p: ProtocolParams, t: float, delta: float = 0.0) -> AngleSample:
    tab = _table(p, t)[:, 0]
    J, G = tab[0], tab[1]
    phi, phi_dot = _phi_from(J, G, tab[2], tab[3], delta)
    return AngleSample(
        t=float(t),
        J=float(J),
        G2=float(G),
        g0=float(np.hypot(J, G)),
        theta=float(np.arctan2(J, G)),
        theta_dot=float(tab[6]),
        phi=float(phi),
        phi_dot=float(phi_dot),
        R=float(adiabatic_ratio(p, t, delta)),
    )


def end_of_pulse(p: ProtocolParams, ratio: float) -> float:
    """Time after the ``J = G2`` crossing at which ``J/G2`` falls to ``ratio``.

    Searches the interval ``[t_start, t_end]`` of ``p``; widen the window
    first if the ratio is reached later.
    """
    if not 0 < ratio < 1:
        raise DomainError(f"end-of-pulse ratio must lie in (0, 1), got {ratio}")
    target = math.log(ratio)

    def f(t):
        J, G = pulse_pair(p, t, check=False)
        return math.log(J) - math.log(G) - target

    ts = np.linspace(p.t_start, p.t_end, 4001)[1:-1]
    J, G = pulse_pair(p, ts, check=False)
    with np.errstate(divide="ignore"):
        vals = np.log(J) - np.log(G) - target
    idx = np.flatnonzero((vals[:-1] > 0) & (vals[1:] <= 0))
    if idx.size == 0:
        raise DomainError(f"J/G2 never reaches {ratio:g} inside the window")
    i = idx[0]
    return optimize.brentq(f, ts[i], ts[i + 1], xtol=1e-10, rtol=1e-14)
