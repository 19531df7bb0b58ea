"""Closed second-order-moment equations of the linearized three-mode model.

Twelve complex moments determine every quadratic expectation value; the
remaining ones (``<a1 a2^dag>``, ``<b b>``, ...) are complex conjugates of
these. The equations are exact for the linearized master equation, with
no Gaussian-state assumption.

Frame and conventions
---------------------
All modes rotate at ``omega_m``. ``J`` and ``G2`` are real. The
counterdiabatic a1-b coupling enters the Hamiltonian as
``G1 a1^dag b + G1* a1 b^dag`` with ``G1 = 1j * theta_dot``, i.e. ``G1`` is
the ``(a1, b)`` entry of the shortcut generator. Counter-rotating terms
``G2 e^{+-2i omega_m t}`` can be switched off; the a1-b channel has none.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, fields

import numba
import numpy as np

from ..errors import ConfigError, DomainError, IntegrationError

N1, N2, NB, A1A2, A1B, A2B, A1dA2d, A1dBd, A2dBd, A1dA1d, A2dA2d, BdBd = range(12)

MOMENT_NAMES = (
    "a1^dag a1",
    "a2^dag a2",
    "b^dag b",
    "a1^dag a2",
    "a1^dag b",
    "a2^dag b",
    "a1^dag a2^dag",
    "a1^dag b^dag",
    "a2^dag b^dag",
    "a1^dag a1^dag",
    "a2^dag a2^dag",
    "b^dag b^dag",
)


@dataclass(frozen=True)
class SystemParams:
    """Rates and detunings in units of ``omega_m``.

    ``delta`` is the quasi-single-photon detuning ``Delta2 - omega_m``;
    ``Delta1 = omega_m`` is implied. ``g1`` and ``g2`` are only used for
    drive reconstruction.
    """

    omega_m: float = 1.0
    delta: float = 0.0
    kappa1: float = 0.0
    kappa2: float = 0.0
    gamma_m: float = 0.0
    n_bar: float = 0.0
    g1: float = 6e-5
    g2: float = 6e-5
    include_counter_rotating: bool = True
    sta_enabled: bool = False

    def __post_init__(self):
        bad = []
        for name in ("omega_m", "kappa1", "kappa2", "gamma_m", "n_bar", "g1", "g2"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                bad.append(f"{name} must be finite and >= 0 (got {value})")
        if not np.isfinite(self.delta):
            bad.append(f"delta must be finite (got {self.delta})")
        if not self.omega_m > 0:
            bad.append("omega_m must be > 0")
        if bad:
            raise ConfigError(bad)

    @property
    def Delta1(self) -> float:
        return self.omega_m

    @property
    def Delta2(self) -> float:
        return self.omega_m + self.delta

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class MomentState:
    """The twelve canonical moments at one instant.

    Wraps a complex array of length 12 ordered as :data:`MOMENT_NAMES`.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        values = np.array(values, dtype=complex).reshape(-1)
        if values.shape != (12,):
            raise ValueError(f"expected 12 moments, got {values.shape[0]}")
        self.values = values

    @property
    def n1(self) -> float:
        return self.values[N1].real

    @property
    def n2(self) -> float:
        return self.values[N2].real

    @property
    def nb(self) -> float:
        return self.values[NB].real

    def as_dict(self) -> dict[str, complex]:
        return dict(zip(MOMENT_NAMES, self.values))

    def check(self, tol: float = 1e-8) -> list[str]:
        """Violations of hermiticity / positivity of the number moments."""
        out = []
        for k, name in zip((N1, N2, NB), MOMENT_NAMES):
            v = self.values[k]
            if abs(v.imag) > tol * (1.0 + abs(v)):
                out.append(f"<{name}> has imaginary part {v.imag:.3g}")
            if v.real < -tol:
                out.append(f"<{name}> is negative ({v.real:.3g})")
        return out

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __repr__(self):
        return f"MomentState(n1={self.n1:.6g}, n2={self.n2:.6g}, nb={self.nb:.6g})"


def initial_state(n0: float) -> MomentState:
    """Thermal-free start: ``<b^dag b> = n0``, every other moment zero."""
    if not (np.isfinite(n0) and n0 >= 0):
        raise DomainError(f"initial occupation must be finite and >= 0 (got {n0})")
    y = np.zeros(12, dtype=complex)
    y[NB] = n0
    return MomentState(y)


@numba.njit(cache=True)
def _deriv(t, y, out, J, G2, G1, delta, k1, k2, gm, nbar, wm, cr):
    G1c = G1.conjugate()
    if cr:
        e = G2 * cmath.exp(2j * wm * t)
        em = e.conjugate()
    else:
        e = 0j
        em = 0j
    n1 = y[0]
    n2 = y[1]
    nb = y[2]
    a12 = y[3]
    a1b = y[4]
    a2b = y[5]
    p12 = y[6]
    p1b = y[7]
    p2b = y[8]
    p11 = y[9]
    p22 = y[10]
    pbb = y[11]
    # <a1 a2^dag> = conj<a1^dag a2>, <a1 b^dag> = conj<a1^dag b>, etc.
    a12c = a12.conjugate()
    a1bc = a1b.conjugate()
    a2bc = a2b.conjugate()
    p2bc = p2b.conjugate()
    pbbc = pbb.conjugate()
    # a1^dag b carries G1 (not G1*) so that G1 = i*theta_dot is the (a1, b)
    # entry of the shortcut generator
    out[0] = -1j * J * a12 + 1j * J * a12c + 1j * G1c * a1bc - 1j * G1 * a1b - k1 * n1
    out[1] = (
        1j * J * a12 - 1j * J * a12c - 1j * G2 * a2b + 1j * G2 * a2bc
        - 1j * e * p2b + 1j * em * p2bc - k2 * n2
    )
    out[2] = (
        1j * G2 * a2b - 1j * G2 * a2bc - 1j * e * p2b + 1j * em * p2bc
        - 1j * G1c * a1bc + 1j * G1 * a1b - gm * nb + gm * nbar
    )
    out[3] = (
        -(1j * delta + 0.5 * (k1 + k2)) * a12 - 1j * J * n1 + 1j * J * n2
        - 1j * G2 * a1b - 1j * e * p1b + 1j * G1c * a2bc
    )
    out[4] = (
        1j * J * a2b - 1j * G2 * a12 - 1j * e * p12
        - 1j * G1c * n1 + 1j * G1c * nb - 0.5 * (k1 + gm) * a1b
    )
    out[5] = (
        (1j * delta - 0.5 * (k2 + gm)) * a2b + 1j * J * a1b - 1j * G2 * n2 + 1j * G2 * nb
        - 1j * e * p22 + 1j * em * pbbc - 1j * G1c * a12c
    )
    out[6] = (
        1j * delta * p12 + 1j * J * p11 + 1j * J * p22 + 1j * G2 * p1b
        + 1j * em * a1b + 1j * G1c * p2b - 0.5 * (k1 + k2) * p12
    )
    out[7] = (
        1j * J * p2b + 1j * G2 * p12 + 1j * em * a12
        + 1j * G1c * pbb + 1j * G1 * p11 - 0.5 * (k1 + gm) * p1b
    )
    out[8] = (
        (1j * delta - 0.5 * (k2 + gm)) * p2b + 1j * J * p1b + 1j * G2 * p22 + 1j * G2 * pbb
        + 1j * em * (n2 + 1.0 + nb) + 1j * G1 * p12
    )
    out[9] = 2j * J * p12 + 2j * G1c * p1b - k1 * p11
    out[10] = (2j * delta - k2) * p22 + 2j * J * p12 + 2j * G2 * p2b + 2j * em * a2b
    out[11] = 2j * G2 * p2b + 2j * em * a2bc + 2j * G1 * p1b - gm * pbb


def moment_derivative(t, state, sys: SystemParams, J, G2, G1=0j) -> np.ndarray:
    """Time derivative of the moments for explicit coupling values."""
    y = np.ascontiguousarray(np.asarray(state, dtype=complex))
    if not np.all(np.isfinite(y)):
        raise IntegrationError("non-finite moment state", t=float(t))
    out = np.empty(12, dtype=complex)
    _deriv(
        float(t), y, out, float(J), float(G2), complex(G1), sys.delta,
        sys.kappa1, sys.kappa2, sys.gamma_m, sys.n_bar, sys.omega_m,
        bool(sys.include_counter_rotating),
    )
    return out


def moment_rhs(t, state, sys: SystemParams, sched=None) -> np.ndarray:
    """Right-hand side of the moment equations at time ``t``.

    Parameters
    ----------
    t : float
    state : MomentState or array_like of 12 complex
    sys : SystemParams
        ``sys.sta_enabled`` switches the counterdiabatic channel
        ``G1 = 1j * theta_dot`` on.
    sched : CouplingSchedule, optional
        ``None`` means all couplings are off.

    Returns
    -------
    ndarray
        Complex derivative, same ordering as :data:`MOMENT_NAMES`.
    """
    if sched is None:
        return moment_derivative(t, state, sys, 0.0, 0.0, 0j)
    J, G2 = sched.J(t), sched.G2(t)
    G1 = sched.G1(t) if sys.sta_enabled else 0j
    return moment_derivative(t, state, sys, J, G2, G1)
