"""Second-order-moment dynamics of the linearized three-mode system."""

from .moments import (
    MOMENT_NAMES,
    MomentState,
    SystemParams,
    initial_state,
    moment_derivative,
    moment_rhs,
)
from .simulate import RunResult, figures_of_merit, integrate, speedup

__all__ = [
    "MOMENT_NAMES",
    "MomentState",
    "RunResult",
    "SystemParams",
    "figures_of_merit",
    "initial_state",
    "integrate",
    "moment_derivative",
    "moment_rhs",
    "speedup",
]
