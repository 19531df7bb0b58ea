"""Run the moment equations over a window and summarise the trajectory."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import protocols as pr
from ..errors import AccuracyError, DomainError, IntegrationError, StiffnessError
from ..spectral import max_theta_dot
from .integrator import MAX_STEPS, NONFINITE, OK, STEP_UNDERFLOW, run_kernel
from .moments import N1, N2, NB, MomentState, SystemParams

__all__ = ["RunResult", "integrate", "figures_of_merit", "speedup", "kernel_params"]


@dataclass(frozen=True)
class RunResult:
    """Population trajectories and figures of merit of one run.

    ``pb_final`` is the phonon number at the window end (the end of the
    pulse), ``pb_min`` its minimum over the run and ``t_ground`` the first
    time it drops below 1 (``None`` if it never does).
    """

    times: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    Pb: np.ndarray
    pb_final: float
    pb_min: float
    t_pb_min: float
    t_ground: float | None
    t_start: float
    t_end: float
    final_state: MomentState | None = None
    moments: np.ndarray | None = field(default=None, repr=False)
    diagnostics: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        if self.t_ground is not None and not (self.t_start <= self.t_ground <= self.t_end):
            raise ValueError(f"t_ground {self.t_ground} outside [{self.t_start}, {self.t_end}]")

    @property
    def total(self) -> np.ndarray:
        return self.P1 + self.P2 + self.Pb

    def at(self, t: float) -> float:
        """Phonon number interpolated from the reporting grid."""
        return float(np.interp(t, self.times, self.Pb))


def kernel_params(sys: SystemParams, sched) -> np.ndarray:
    if sched is None:
        code, g, T, xi, tf = -1, 0.0, 1.0, 0.0, 0.0
    else:
        p = sched.protocol
        code, g, T, xi, tf = p.family.code, p.g, p.T, p.xi, p.t_f
    return np.array(
        [
            code, g, T, xi, tf, sys.delta, sys.kappa1, sys.kappa2, sys.gamma_m,
            sys.n_bar, sys.omega_m, float(sys.include_counter_rotating),
            float(sys.sta_enabled),
        ],
        dtype=float,
    )


def integrate(
    sys: SystemParams,
    sched,
    initial,
    window=None,
    *,
    t_eval=None,
    grid_points: int = 2000,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    threshold: float = 1.0,
    max_steps: int = 50_000_000,
    label: str = "",
) -> RunResult:
    """Integrate the moment equations with adaptive Dormand-Prince 5(4).

    Parameters
    ----------
    sys : SystemParams
    sched : CouplingSchedule or None
        ``None`` integrates the uncoupled (free, damped) system; ``window``
        is then required.
    initial : MomentState or array_like
    window : (float, float), optional
        Defaults to the protocol window of ``sched``.
    t_eval : array_like, optional
        Reporting times; defaults to ``grid_points`` uniform points.
    threshold : float
        Phonon number whose first downward crossing defines ``t_ground``.

    Raises
    ------
    StiffnessError
        Step size underflow.
    AccuracyError
        Step budget exhausted before reaching the window end.
    IntegrationError
        Non-finite state.
    """
    if window is None:
        if sched is None:
            raise DomainError("a window is required when no schedule is given")
        window = (sched.t_start, sched.t_end)
    t0, t1 = map(float, window)
    if not t1 > t0:
        raise DomainError(f"empty window [{t0}, {t1}]")
    if sched is not None:
        p = sched.protocol
        slack = 1e-9 * (p.t_end - p.t_start)
        if t0 < p.t_start - slack or t1 > p.t_end + slack:
            raise DomainError(f"window [{t0}, {t1}] exceeds the protocol window [{p.t_start}, {p.t_end}]")
    y0 = np.asarray(initial, dtype=complex)
    if not np.all(np.isfinite(y0)):
        raise IntegrationError("non-finite initial state", t=t0)
    if t_eval is None:
        t_eval = np.linspace(t0, t1, grid_points)
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.size and (t_eval.min() < t0 or t_eval.max() > t1 or np.any(np.diff(t_eval) < 0)):
        raise DomainError("t_eval must be sorted and lie inside the window")

    pars = kernel_params(sys, sched)
    Y, y_end, status, stats = run_kernel(
        y0, t0, t1, t_eval, pars, rtol, atol, max_steps, threshold, NB
    )
    if status == STEP_UNDERFLOW:
        raise StiffnessError("step size underflow", t=stats[3])
    if status == MAX_STEPS:
        raise AccuracyError(f"tolerance not met within {max_steps} steps", t=stats[3])
    if status == NONFINITE:
        raise IntegrationError("non-finite state during integration", t=stats[3])
    assert status == OK

    pb_final = float(y_end[NB].real)
    pb_min = min(float(stats[5]), pb_final)
    t_cross = None if np.isnan(stats[4]) else float(stats[4])
    diagnostics = {
        "n_steps": int(stats[0]),
        "n_rejected": int(stats[1]),
        "nfev": int(stats[2]),
        "max_imag_number": float(stats[7]),
        "min_number": float(stats[8]),
        "h_min": float(stats[9]),
        "h_max": float(stats[10]),
        "rtol": rtol,
        "atol": atol,
    }
    if sched is not None:
        p = sched.protocol
        grid = np.linspace(t0, t1, 20001)
        diagnostics.update(
            max_R=float(np.max(pr.adiabatic_ratio(p, grid, sched.delta))),
            max_theta_dot=max_theta_dot(p),
            ratio_start=float(pr.coupling_ratio(p, t0)),
            ratio_end=float(pr.coupling_ratio(p, t1)),
        )
    return RunResult(
        times=t_eval,
        P1=Y[:, N1].real.copy(),
        P2=Y[:, N2].real.copy(),
        Pb=Y[:, NB].real.copy(),
        pb_final=pb_final,
        pb_min=pb_min,
        t_pb_min=float(stats[6]) if pb_min < pb_final else t1,
        t_ground=t_cross,
        t_start=t0,
        t_end=t1,
        final_state=MomentState(y_end),
        moments=Y,
        diagnostics=diagnostics,
        label=label,
    )


def speedup(slow: RunResult, fast: RunResult) -> float:
    """Ratio of end-of-pulse times ``slow.t_end / fast.t_end``."""
    return (slow.t_end - slow.t_start) / (fast.t_end - fast.t_start)


def _bisect_crossing(times, values, threshold, tol):
    below = np.flatnonzero(values < threshold)
    if below.size == 0:
        return None
    i = below[0]
    if i == 0:
        return float(times[0])
    lo, hi = times[i - 1], times[i]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if np.interp(mid, times, values) < threshold:
            hi = mid
        else:
            lo = mid
    return float(0.5 * (lo + hi))


def figures_of_merit(run: RunResult, reference: RunResult | None = None) -> dict:
    """Summary numbers for one run.

    ``t_ground`` is the first downward crossing of ``P_b = 1``. When a
    slower ``reference`` run is given, ``speedup`` compares the two
    end-of-pulse times.
    """
    t_ground = run.t_ground
    if t_ground is None:
        t_ground = _bisect_crossing(run.times, run.Pb, 1.0, 1e-3)
    out = {
        "label": run.label,
        "t_end": run.t_end,
        "pb_final": run.pb_final,
        "pb_min": run.pb_min,
        "t_pb_min": run.t_pb_min,
        "t_ground": t_ground,
    }
    for key in ("max_R", "max_theta_dot", "ratio_start", "ratio_end"):
        if key in run.diagnostics:
            out[key] = run.diagnostics[key]
    if reference is not None:
        out["speedup"] = speedup(reference, run)
    return out
