"""Brute-force Lindblad evolution in a truncated Fock basis.

Only used as an independent check on the moment equations: it builds the
same rotating-frame Hamiltonian directly from ladder operators and evolves
the full density matrix, so any sign or conjugation slip in the moment
transcription shows up as a disagreement.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate as spi

from ..errors import DomainError, IntegrationError, TruncationError
from .moments import N1, N2, NB, MomentState, SystemParams
from .simulate import RunResult

__all__ = ["FockModel", "fock_oracle", "fock_moments"]


def _destroy(n):
    return np.diag(np.sqrt(np.arange(1, n)), 1)


class FockModel:
    """Ladder operators and Lindblad generator on ``C^d1 x C^d2 x C^db``."""

    def __init__(self, sys: SystemParams, dims=(4, 4, 6)):
        d1, d2, db = dims
        if d1 * d2 * db > 400:
            raise DomainError(f"Fock space too large for the oracle: {dims}")
        self.sys = sys
        self.dims = tuple(dims)
        I1, I2, Ib = np.eye(d1), np.eye(d2), np.eye(db)
        self.a1 = np.kron(np.kron(_destroy(d1), I2), Ib)
        self.a2 = np.kron(np.kron(I1, _destroy(d2)), Ib)
        self.b = np.kron(np.kron(I1, I2), _destroy(db))
        self.dim = d1 * d2 * db
        a1, a2, b = self.a1, self.a2, self.b
        a1d, a2d, bd = a1.T, a2.T, b.T
        self.n1, self.n2, self.nb = a1d @ a1, a2d @ a2, bd @ b
        self.hop = a1d @ a2 + a2d @ a1
        self.beam2 = a2d @ b + bd @ a2
        self.pair2 = a2d @ bd
        self.cd = a1d @ b
        jumps = []
        if sys.kappa1 > 0:
            jumps.append(np.sqrt(sys.kappa1) * a1)
        if sys.kappa2 > 0:
            jumps.append(np.sqrt(sys.kappa2) * a2)
        if sys.gamma_m > 0:
            jumps.append(np.sqrt(sys.gamma_m * (sys.n_bar + 1)) * b)
            if sys.n_bar > 0:
                jumps.append(np.sqrt(sys.gamma_m * sys.n_bar) * bd)
        self.jumps = jumps
        self.jump_norm = sum((L.conj().T @ L for L in jumps), np.zeros((self.dim, self.dim)))
        # projectors onto the top Fock level of each mode
        self.top = []
        for k, d in enumerate(self.dims):
            diag = [np.eye(n) for n in self.dims]
            diag[k] = np.diag(np.eye(d)[-1])
            self.top.append(np.kron(np.kron(diag[0], diag[1]), diag[2]))

    def hamiltonian(self, t, J, G2, G1=0j):
        sys = self.sys
        H = sys.delta * self.n2 + J * self.hop + G2 * self.beam2
        H = H.astype(complex)
        if sys.include_counter_rotating and G2 != 0:
            P = G2 * np.exp(2j * sys.omega_m * t) * self.pair2
            H = H + P + P.conj().T
        if G1 != 0:
            C = G1 * self.cd
            H = H + C + C.conj().T
        return H

    def lindblad(self, rho, H):
        out = -1j * (H @ rho - rho @ H)
        for L in self.jumps:
            out += L @ rho @ L.conj().T
        out -= 0.5 * (self.jump_norm @ rho + rho @ self.jump_norm)
        return out

    def moments(self, rho) -> np.ndarray:
        """The twelve canonical moments ``Tr[rho o_m o_n]``."""
        a1, a2, b = self.a1, self.a2, self.b
        a1d, a2d, bd = a1.T, a2.T, b.T
        ops = [
            a1d @ a1, a2d @ a2, bd @ b, a1d @ a2, a1d @ b, a2d @ b,
            a1d @ a2d, a1d @ bd, a2d @ bd, a1d @ a1d, a2d @ a2d, bd @ bd,
        ]
        return np.array([np.trace(rho @ op) for op in ops])

    def fock_state(self, n1=0, n2=0, nb=0):
        idx = np.ravel_multi_index((n1, n2, nb), self.dims)
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        rho[idx, idx] = 1.0
        return rho


def fock_moments(model: FockModel, rho) -> np.ndarray:
    return model.moments(rho)


def _couplings(sched, sys, t):
    if sched is None:
        return 0.0, 0.0, 0j
    J, G2 = sched.J(t), sched.G2(t)
    G1 = sched.G1(t) if sys.sta_enabled else 0j
    return float(J), float(G2), complex(G1)


def fock_oracle(
    sys: SystemParams,
    sched,
    dims=(4, 4, 6),
    initial=None,
    window=None,
    *,
    t_eval=None,
    grid_points: int = 401,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    leakage_tol: float = 1e-6,
) -> RunResult:
    """Evolve the truncated-Fock master equation and report populations.

    Parameters
    ----------
    initial : MomentState or ndarray
        A moment state with integer number moments and all other moments
        zero is mapped to the corresponding Fock product state; a square
        array is taken as the density matrix itself.

    Raises
    ------
    TruncationError
        If any mode's top Fock level carries more than ``leakage_tol``.
    """
    model = FockModel(sys, dims)
    if window is None:
        if sched is None:
            raise DomainError("a window is required when no schedule is given")
        window = (sched.t_start, sched.t_end)
    t0, t1 = map(float, window)
    rho0 = _initial_rho(model, initial)
    if t_eval is None:
        t_eval = np.linspace(t0, t1, grid_points)

    def rhs(t, y):
        rho = y.reshape(model.dim, model.dim)
        H = model.hamiltonian(t, *_couplings(sched, sys, t))
        return model.lindblad(rho, H).ravel()

    sol = spi.solve_ivp(rhs, (t0, t1), rho0.ravel(), method="DOP853", t_eval=t_eval,
                        rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"Fock oracle failed: {sol.message}")
    rhos = sol.y.T.reshape(-1, model.dim, model.dim)
    moments = np.array([model.moments(r) for r in rhos])
    leak = max(
        float(np.max(np.real(np.einsum("ij,tji->t", P, rhos)))) for P in model.top
    )
    if leak > leakage_tol:
        raise TruncationError(f"top Fock level population {leak:.3g} exceeds {leakage_tol:g}")
    Pb = moments[:, NB].real
    below = np.flatnonzero(Pb < 1.0)
    return RunResult(
        times=np.asarray(sol.t),
        P1=moments[:, N1].real,
        P2=moments[:, N2].real,
        Pb=Pb,
        pb_final=float(Pb[-1]),
        pb_min=float(Pb.min()),
        t_pb_min=float(sol.t[np.argmin(Pb)]),
        t_ground=float(sol.t[below[0]]) if below.size else None,
        t_start=t0,
        t_end=t1,
        final_state=MomentState(moments[-1]),
        moments=moments,
        diagnostics={"leakage": leak, "nfev": int(sol.nfev)},
        label="fock-oracle",
    )


def _initial_rho(model: FockModel, initial):
    if initial is None:
        return model.fock_state()
    arr = np.asarray(initial, dtype=complex)
    if arr.ndim == 2:
        if arr.shape != (model.dim, model.dim):
            raise DomainError(f"density matrix must be {model.dim}x{model.dim}")
        return arr
    m = MomentState(arr).values
    if np.any(np.abs(m[3:]) > 0):
        raise DomainError("only diagonal Fock product states can be built from moments")
    occ = m[:3].real
    if np.any(np.abs(occ - np.round(occ)) > 1e-12) or np.any(occ < 0):
        raise DomainError(f"number moments must be non-negative integers, got {occ}")
    n = tuple(int(round(x)) for x in occ)
    if any(k >= d for k, d in zip(n, model.dims)):
        raise DomainError(f"occupation {n} does not fit in dims {model.dims}")
    return model.fock_state(*n)
