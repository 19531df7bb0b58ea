"""Plain-text scenario configuration.

One ``key=value`` per line, ``#`` starts a comment. Several pairs may share
a line when separated by whitespace (``protocol=gaussian mode=sta T=16``).
Anything not given falls back to the experimental defaults below.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import protocols as pr
from ..dynamics.moments import SystemParams
from ..errors import ConfigError
from ..protocols import Family, ProtocolParams
from ..spectral import max_theta_dot

__all__ = [
    "Mode",
    "ScenarioConfig",
    "PolicyWarning",
    "KEYS",
    "load_config",
    "parse_config",
    "build_config",
    "serialize",
    "policy_violations",
    "DEFAULTS",
    "STANDARD_WIDTHS",
]


class Mode(enum.Enum):
    STIRAP = "stirap"
    STA = "sta"
    STA_NO_CD = "sta_no_cd"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown mode {value!r}; expected stirap, sta or sta_no_cd") from None


class PolicyWarning(UserWarning):
    """A scenario violates a selection criterion (adiabaticity or |theta_dot| <= g)."""


KEYS = (
    "protocol", "mode", "T", "xi", "t_f", "g", "delta", "kappa1", "kappa2",
    "gamma_m", "n_bar", "g1", "g2", "n0", "t_start", "t_end", "grid_points",
    "include_counter_rotating", "strict",
)

# experimental parameter set used throughout unless overridden
DEFAULTS = {
    "mode": "stirap",
    "g": 0.1,
    "delta": 0.0,
    "kappa1": 2e-2,
    "kappa2": 2e-2,
    "gamma_m": 3e-6,
    "n_bar": 1e4,
    "g1": 6e-5,
    "g2": 6e-5,
    "n0": 1e4,
    "grid_points": 2000,
    "include_counter_rotating": True,
    "strict": False,
}

# pulse widths T (units of 1/omega_m) chosen for adiabatic passage and for the
# shortcut, per family
STANDARD_WIDTHS = {
    Mode.STIRAP: {Family.GAUSSIAN: 1600.0, Family.SIN4: 35200.0, Family.INVSQRT: 253.0, Family.VITANOV: 395.0},
    Mode.STA: {Family.GAUSSIAN: 16.0, Family.SIN4: 126.0, Family.INVSQRT: 2.53, Family.VITANOV: 3.95},
}
STANDARD_WIDTHS[Mode.STA_NO_CD] = STANDARD_WIDTHS[Mode.STA]

# adiabatic passages end where J/G2 has fallen to these values
STIRAP_END_RATIO = {Family.GAUSSIAN: 6.5e-4, Family.SIN4: 4e-5, Family.INVSQRT: 1.04e-3, Family.VITANOV: 1.32e-3}

# shortcut passages end at these multiples of T (77, 59, 102 and 61.5 at the
# default widths)
STA_END_FACTOR = {
    Family.GAUSSIAN: 77.0 / 16.0,
    Family.SIN4: 59.0 / 126.0,
    Family.INVSQRT: 102.0 / 2.53,
    Family.VITANOV: 61.5 / 3.95,
}

_FLOAT_KEYS = {"T", "xi", "t_f", "g", "delta", "kappa1", "kappa2", "gamma_m", "n_bar",
               "g1", "g2", "n0", "t_start", "t_end"}
_BOOL_KEYS = {"include_counter_rotating", "strict"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully validated scenario.

    ``policy`` lists the selection-criterion warnings raised while
    building it (empty when the scenario is within policy).
    """

    protocol: ProtocolParams
    system: SystemParams
    mode: Mode
    n0: float = 1e4
    grid_points: int = 2000
    strict: bool = False
    policy: tuple[str, ...] = field(default=(), compare=False)

    @property
    def family(self) -> Family:
        return self.protocol.family

    @property
    def label(self) -> str:
        return f"{self.family.value}-{self.mode.value}"

    def with_delta(self, delta: float) -> "ScenarioConfig":
        return replace(self, system=replace(self.system, delta=float(delta)))

    def schedule(self):
        from ..schedule import CouplingSchedule

        return CouplingSchedule(self.protocol, self.system.delta)

    def as_dict(self) -> dict:
        p, s = self.protocol, self.system
        return {
            "protocol": p.family.value,
            "mode": self.mode.value,
            "T": p.T,
            "xi": p.xi,
            "t_f": p.t_f,
            "g": p.g,
            "delta": s.delta,
            "kappa1": s.kappa1,
            "kappa2": s.kappa2,
            "gamma_m": s.gamma_m,
            "n_bar": s.n_bar,
            "g1": s.g1,
            "g2": s.g2,
            "n0": self.n0,
            "t_start": p.t_start,
            "t_end": p.t_end,
            "grid_points": self.grid_points,
            "include_counter_rotating": s.include_counter_rotating,
            "strict": self.strict,
        }


def _parse_value(key, text, errors):
    text = text.strip()
    if key in _FLOAT_KEYS:
        try:
            value = float(text)
        except ValueError:
            errors.append(f"{key}: expected a number, got {text!r}")
            return None
        if not math.isfinite(value):
            errors.append(f"{key}: must be finite, got {text!r}")
            return None
        return value
    if key == "grid_points":
        try:
            return int(text)
        except ValueError:
            errors.append(f"grid_points: expected an integer, got {text!r}")
            return None
    if key in _BOOL_KEYS:
        low = text.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        errors.append(f"{key}: expected true/false, got {text!r}")
        return None
    return text


def parse_config(text: str) -> dict:
    """Parse config text into a dict of typed values (no defaults, no validation)."""
    out, errors = _parse(text)
    if errors:
        raise ConfigError(errors)
    return out


def _parse(text: str):
    out = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        pairs = [line] if line.count("=") == 1 else line.split()
        for pair in pairs:
            if "=" not in pair:
                errors.append(f"line {lineno}: expected key=value, got {pair!r}")
                continue
            key, value = (s.strip() for s in pair.split("=", 1))
            if key not in KEYS:
                errors.append(f"line {lineno}: unknown key {key!r}")
                continue
            if key in out:
                errors.append(f"line {lineno}: duplicate key {key!r}")
                continue
            parsed = _parse_value(key, value, errors)
            if parsed is not None:
                out[key] = parsed
    return out, errors


def _default_window(family: Family, mode: Mode, proto: ProtocolParams) -> tuple[float, float]:
    if mode is Mode.STIRAP:
        return proto.t_start, pr.end_of_pulse(proto, STIRAP_END_RATIO[family])
    return proto.t_start, STA_END_FACTOR[family] * proto.T


def policy_violations(cfg: ScenarioConfig) -> list[str]:
    """Selection-criterion violations for the scenario's mode.

    Adiabatic passages should keep ``max R < 0.01``; shortcuts should keep
    ``max |theta_dot| <= g``.
    """
    p = cfg.protocol
    out = []
    if cfg.mode is Mode.STIRAP:
        R = float(np.max(pr.adiabatic_ratio(p, p.grid(20001), cfg.system.delta)))
        if not R < 0.01:
            out.append(f"max R = {R:.4g} is not below 0.01; increase T to make the passage adiabatic")
    else:
        td = max_theta_dot(p)
        if td > p.g * (1 + 1e-12):
            out.append(f"max |theta_dot| = {td:.4g} exceeds g = {p.g:g}; increase T")
    return out


def build_config(values: dict, _prior=()) -> ScenarioConfig:
    """Validate parsed values and fill defaults.

    Raises
    ------
    ConfigError
        Listing every problem found, not just the first.
    """
    errors = list(_prior)
    unknown = sorted(set(values) - set(KEYS))
    errors += [f"unknown key {k!r}" for k in unknown]
    v = {**DEFAULTS, **{k: values[k] for k in values if k in KEYS}}
    if "protocol" not in values:
        errors.append("protocol is required (gaussian, sin4, invsqrt or vitanov)")
    family = mode = None
    try:
        family = Family.parse(v["protocol"]) if "protocol" in values else None
    except ConfigError as exc:
        errors += exc.violations
    try:
        mode = Mode.parse(v["mode"])
    except ConfigError as exc:
        errors += exc.violations
    if v["n0"] < 0:
        errors.append(f"n0 must be >= 0 (got {v['n0']})")
    if v["grid_points"] < 2:
        errors.append(f"grid_points must be >= 2 (got {v['grid_points']})")

    system = None
    try:
        system = SystemParams(
            delta=v["delta"], kappa1=v["kappa1"], kappa2=v["kappa2"], gamma_m=v["gamma_m"],
            n_bar=v["n_bar"], g1=v["g1"], g2=v["g2"],
            include_counter_rotating=v["include_counter_rotating"],
            sta_enabled=mode is Mode.STA,
        )
    except ConfigError as exc:
        errors += exc.violations

    proto = None
    if family is not None and mode is not None:
        T = v.get("T", STANDARD_WIDTHS[mode][family])
        try:
            proto = ProtocolParams.create(family, g=v["g"], T=T, xi=v.get("xi"), t_f=v.get("t_f"),
                                          t_start=v.get("t_start"))
            if "t_end" in v:
                proto = proto.with_window(t_end=v["t_end"])
            else:
                # may lie past the family's nominal window (inverse-sqrt shortcut)
                proto = proto.with_window(t_end=_default_window(family, mode, proto)[1])
        except ConfigError as exc:
            errors += exc.violations
        except Exception as exc:  # end_of_pulse on a malformed window
            errors.append(str(exc))

    if errors:
        raise ConfigError(errors)
    if mode is Mode.STA and system.g1 == 0:
        raise ConfigError(["mode=sta needs g1 > 0 for the counterdiabatic a1-b coupling"])

    cfg = ScenarioConfig(
        protocol=proto, system=system, mode=mode, n0=float(v["n0"]),
        grid_points=int(v["grid_points"]), strict=bool(v["strict"]),
    )
    problems = policy_violations(cfg)
    if problems:
        if cfg.strict:
            raise ConfigError(problems)
        for msg in problems:
            warnings.warn(f"{cfg.label}: {msg}", PolicyWarning, stacklevel=2)
    return replace(cfg, policy=tuple(problems))


def load_config(path) -> ScenarioConfig:
    """Read, validate and complete a config file."""
    values, errors = _parse(Path(path).read_text())
    return build_config(values, errors)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize(cfg: ScenarioConfig) -> str:
    """Config text that loads back to an equal :class:`ScenarioConfig`."""
    lines = [f"{k}={_fmt(val)}" for k, val in cfg.as_dict().items()]
    return "\n".join(lines) + "\n"
