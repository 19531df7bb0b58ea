"""Accelerated ground-state cooling of a mechanical resonator in a
loop-coupled optomechanical system: STIRAP pulse protocols, their
counterdiabatic shortcuts, and exact moment dynamics."""

from .errors import (
    AccuracyError,
    ConfigError,
    DomainError,
    IntegrationError,
    SingularityError,
    StiffnessError,
    TruncationError,
)
from .protocols import Family, ProtocolParams
from .schedule import CouplingSchedule
from .dynamics import MomentState, RunResult, SystemParams, initial_state, integrate

__version__ = "0.1.0"
