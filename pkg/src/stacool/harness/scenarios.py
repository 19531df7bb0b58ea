"""Named scenarios with the published parameter sets.

Adiabatic passages use the widths ``T = 1600, 35200, 253, 395`` and the
shortcuts ``T = 16, 126, 2.53, 3.95`` (Gaussian, sin^4, inverse-sqrt,
Vitanov). Dissipationless runs switch every loss channel and the thermal
bath off; dissipative ones keep the defaults of :mod:`.config`.
"""

from __future__ import annotations

from ..protocols import Family
from .config import Mode, ScenarioConfig, build_config

__all__ = ["standard_scenario", "standard_scenarios", "FAMILIES"]

FAMILIES = (Family.GAUSSIAN, Family.SIN4, Family.INVSQRT, Family.VITANOV)

_LOSSLESS = {"kappa1": 0.0, "kappa2": 0.0, "gamma_m": 0.0, "n_bar": 0.0}


def standard_scenario(family, mode="stirap", *, dissipative: bool = False, **overrides) -> ScenarioConfig:
    """Build one published scenario; ``overrides`` are extra config keys."""
    values = {"protocol": Family.parse(family).value, "mode": Mode.parse(mode).value}
    if not dissipative:
        values.update(_LOSSLESS)
    values.update(overrides)
    return build_config(values)


def standard_scenarios(mode="stirap", *, dissipative: bool = False, **overrides) -> dict:
    """The four families for one mode, keyed by :class:`Family`."""
    return {f: standard_scenario(f, mode, dissipative=dissipative, **overrides) for f in FAMILIES}
