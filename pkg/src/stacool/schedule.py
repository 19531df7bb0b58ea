"""Time-dependent coupling schedule consumed by the dynamics and drive modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import protocols as pr
from .protocols import ProtocolParams


@dataclass(frozen=True)
class CouplingSchedule:
    """Evaluator bundle for one protocol at fixed detuning ``delta``.

    ``G1`` is the counterdiabatic a1-b channel ``1j * theta_dot``. It is
    always available here; whether the dynamics uses it is decided by
    ``SystemParams.sta_enabled``. With ``check=False`` the closed forms are
    evaluated outside the simulation window too.
    """

    protocol: ProtocolParams
    delta: float = 0.0
    check: bool = True

    @property
    def t_start(self) -> float:
        return self.protocol.t_start

    @property
    def t_end(self) -> float:
        return self.protocol.t_end

    def J(self, t):
        return pr.pulse_pair(self.protocol, t, self.check)[0]

    def G2(self, t):
        return pr.pulse_pair(self.protocol, t, self.check)[1]

    def G1(self, t):
        return 1j * pr.theta_dot(self.protocol, t, self.check)

    def dG1(self, t):
        return 1j * pr.theta_ddot(self.protocol, t, self.check)

    def dJ(self, t):
        return pr.pulse_derivatives(self.protocol, t, self.check)[0]

    def dG2(self, t):
        return pr.pulse_derivatives(self.protocol, t, self.check)[1]

    def g0(self, t):
        return np.hypot(*pr.pulse_pair(self.protocol, t, self.check))

    def theta(self, t):
        return pr.mixing_theta(self.protocol, t, self.check)

    def theta_dot(self, t):
        return pr.theta_dot(self.protocol, t, self.check)

    def phi(self, t):
        return pr.phi_angles(self.protocol, t, self.delta, self.check)[0]

    def phi_dot(self, t):
        return pr.phi_angles(self.protocol, t, self.delta, self.check)[1]

    def R(self, t):
        return pr.adiabatic_ratio(self.protocol, t, self.delta, self.check)

    def sample(self, t: float) -> pr.AngleSample:
        return pr.angle_sample(self.protocol, t, self.delta)

    def table(self, ts) -> dict[str, np.ndarray]:
        """Columns ``J, G2, theta, theta_dot, R`` on the grid ``ts``."""
        ts = np.asarray(ts, dtype=float)
        J, G2 = pr.pulse_pair(self.protocol, ts)
        return {
            "J": J,
            "G2": G2,
            "theta": np.arctan2(J, G2),
            "theta_dot": pr.theta_dot(self.protocol, ts),
            "R": pr.adiabatic_ratio(self.protocol, ts, self.delta),
        }
