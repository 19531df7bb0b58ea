"""Scenario configuration, orchestration and the command-line interface."""

from .config import (
    DEFAULTS,
    KEYS,
    STANDARD_WIDTHS,
    Mode,
    PolicyWarning,
    ScenarioConfig,
    build_config,
    load_config,
    parse_config,
    policy_violations,
    serialize,
)
from .runner import (
    RunOutcome,
    SweepResult,
    default_deltas,
    reconstruct,
    report,
    run,
    simulate,
    sweep_detuning,
)
from .scenarios import FAMILIES, standard_scenario, standard_scenarios
