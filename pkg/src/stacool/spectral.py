"""Instantaneous three-level picture of the three-mode system.

In the single-excitation basis ``(|a1>, |a2>, |b>)`` the RWA Hamiltonian
is a 3x3 Hermitian matrix. This module builds that matrix, its closed-form
eigensystem (dark state plus two bright states), the counterdiabatic
corrections, and a small Schrodinger integrator used to check that the
corrected generator transports the dark state exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import protocols as pr
from .errors import SingularityError
from .protocols import ProtocolParams

__all__ = [
    "EigenTriple",
    "coupling_matrix",
    "eigensystem",
    "cd_matrix_full",
    "cd_matrix_simplified",
    "total_matrix",
    "max_theta_dot",
    "dark_state_transport",
]


@dataclass(frozen=True)
class EigenTriple:
    """Dark (``0``) and bright (``plus``, ``minus``) eigenpairs.

    The dark state carries no ``|a2>`` amplitude and its ``|b>`` component
    is non-positive.
    """

    E0: float
    Eplus: float
    Eminus: float
    lambda0: np.ndarray
    lambdaPlus: np.ndarray
    lambdaMinus: np.ndarray

    @property
    def energies(self) -> np.ndarray:
        return np.array([self.E0, self.Eplus, self.Eminus])

    @property
    def vectors(self) -> np.ndarray:
        """Eigenvectors as columns, ordered like :attr:`energies`."""
        return np.column_stack([self.lambda0, self.lambdaPlus, self.lambdaMinus])


def coupling_matrix(J, G2, delta):
    """RWA coupling matrix ``[[0, J, 0], [J, delta, G2], [0, G2, 0]]``."""
    M = np.zeros((3, 3), dtype=complex)
    M[0, 1] = M[1, 0] = J
    M[1, 2] = M[2, 1] = G2
    M[1, 1] = delta
    return M


def eigensystem(J, G2, delta) -> EigenTriple:
    """Closed-form eigenpairs of :func:`coupling_matrix`.

    Raises
    ------
    SingularityError
        If ``J = G2 = 0`` (the spectrum is degenerate and the mixing angles
        are undefined).
    """
    g0 = float(np.hypot(J, G2))
    if g0 == 0:
        raise SingularityError("degenerate spectrum: J = G2 = 0")
    theta = np.arctan2(J, G2)
    # E+- = delta/2 +- root; the larger-magnitude root is computed directly
    # and the other from E+ E- = -g0^2 to avoid cancellation
    a = np.sqrt(0.25 * delta * delta + g0 * g0) + 0.5 * abs(delta)
    if delta >= 0:
        Eplus, Eminus = a, -(g0 * g0) / a
    else:
        Eplus, Eminus = (g0 * g0) / a, -a
    phi = np.arctan2(g0, Eplus)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    return EigenTriple(
        E0=0.0,
        Eplus=float(Eplus),
        Eminus=float(Eminus),
        lambda0=np.array([ct, 0.0, -st]),
        lambdaPlus=np.array([st * sp, cp, ct * sp]),
        lambdaMinus=np.array([st * cp, -sp, ct * cp]),
    )


def cd_matrix_full(theta_dot, phi_dot, theta):
    """Full counterdiabatic matrix ``i * A`` with ``A`` real antisymmetric."""
    st, ct = np.sin(theta), np.cos(theta)
    A = np.array(
        [
            [0.0, phi_dot * st, theta_dot],
            [-phi_dot * st, 0.0, -phi_dot * ct],
            [-theta_dot, phi_dot * ct, 0.0],
        ]
    )
    return 1j * A


def cd_matrix_simplified(theta_dot):
    """Counterdiabatic matrix keeping only the direct a1-b term."""
    M = np.zeros((3, 3), dtype=complex)
    M[0, 2] = 1j * theta_dot
    M[2, 0] = -1j * theta_dot
    return M


def total_matrix(J, G2, delta, theta_dot):
    """Shortcut generator: :func:`coupling_matrix` plus :func:`cd_matrix_simplified`."""
    return coupling_matrix(J, G2, delta) + cd_matrix_simplified(theta_dot)


def max_theta_dot(p: ProtocolParams, n: int = 20001) -> float:
    """Maximum of ``|theta_dot|`` over the window of ``p``.

    Dense grid search followed by a bounded scalar refinement around the
    best grid point.
    """
    ts = p.grid(n)
    vals = np.abs(pr.theta_dot(p, ts))
    i = int(np.argmax(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, n - 1)]
    if hi <= lo:
        return float(vals[i])
    res = optimize.minimize_scalar(
        lambda t: -abs(pr.theta_dot(p, t)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-10 * max(p.T, 1.0)},
    )
    return float(max(vals[i], -res.fun))


def _generator(p: ProtocolParams, delta: float, counterdiabatic: str):
    def H(t):
        J, G2 = pr.pulse_pair(p, t, check=False)
        td = pr.theta_dot(p, t, check=False)
        if counterdiabatic == "none":
            return coupling_matrix(J, G2, delta)
        if counterdiabatic == "simplified":
            return total_matrix(J, G2, delta, td)
        _, phi_dot = pr.phi_angles(p, t, delta, check=False)
        return coupling_matrix(J, G2, delta) + cd_matrix_full(td, phi_dot, np.arctan2(J, G2))

    return H


def dark_state_transport(
    p: ProtocolParams,
    delta: float = 0.0,
    counterdiabatic: str = "full",
    n_points: int = 401,
    rtol: float = 1e-11,
    atol: float = 1e-13,
):
    """Integrate ``i dpsi/dt = H(t) psi`` from the dark state at ``t_start``.

    Parameters
    ----------
    counterdiabatic : {"full", "simplified", "none"}
        Which correction to add to the bare coupling matrix.

    Returns
    -------
    ts : ndarray
    fidelity : ndarray
        ``|<lambda0(t)|psi(t)>|`` on ``ts``.
    """
    if counterdiabatic not in ("full", "simplified", "none"):
        raise ValueError(f"unknown counterdiabatic mode {counterdiabatic!r}")
    H = _generator(p, delta, counterdiabatic)
    J0, G0 = pr.pulse_pair(p, p.t_start)
    psi0 = eigensystem(J0, G0, delta).lambda0.astype(complex)
    ts = p.grid(n_points)
    sol = integrate.solve_ivp(
        lambda t, y: -1j * (H(t) @ y),
        (p.t_start, p.t_end),
        psi0,
        method="DOP853",
        t_eval=ts,
        rtol=rtol,
        atol=atol,
    )
    J, G2 = pr.pulse_pair(p, ts)
    theta = np.arctan2(J, G2)
    dark = np.stack([np.cos(theta), np.zeros_like(theta), -np.sin(theta)])
    fid = np.abs(np.einsum("ij,ij->j", dark, sol.y))
    return ts, fid
