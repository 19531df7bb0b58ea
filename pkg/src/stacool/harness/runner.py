"""Scenario orchestration: single runs, detuning sweeps, reports and files."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import drives as dv
from ..dynamics.moments import initial_state
from ..dynamics.simulate import RunResult, figures_of_merit, integrate
from ..errors import IntegrationError
from .config import Mode, ScenarioConfig

__all__ = [
    "SCHEMA_VERSION",
    "RunOutcome",
    "SweepResult",
    "run",
    "simulate",
    "sweep_detuning",
    "default_deltas",
    "report",
    "write_timeseries",
    "write_drives",
    "write_sweep",
    "read_csv",
    "load_summary",
    "reconstruct",
]

SCHEMA_VERSION = 1
TIMESERIES_COLUMNS = ("t", "P1", "P2", "Pb", "J", "G2", "theta", "theta_dot", "R")
DRIVE_COLUMNS = ("t", "Re_Omega1", "Im_Omega1", "Re_Omega2", "Im_Omega2")


@dataclass(frozen=True)
class RunOutcome:
    config: ScenarioConfig
    result: RunResult
    summary: dict
    files: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SweepResult:
    """Phonon numbers on a detuning grid, one series per scenario label.

    All series share the same ``deltas``.
    """

    deltas: np.ndarray
    pb_final: dict
    pb_min: dict

    @property
    def labels(self) -> list[str]:
        return list(self.pb_final)


def simulate(cfg: ScenarioConfig) -> RunResult:
    """Integrate one scenario and return the trajectory.

    Raises
    ------
    IntegrationError
        Re-raised with the scenario label prepended.
    """
    sched = cfg.schedule()
    try:
        return integrate(
            cfg.system, sched, initial_state(cfg.n0), grid_points=cfg.grid_points, label=cfg.label
        )
    except IntegrationError as exc:
        raise type(exc)(f"{cfg.label}: {exc}") from exc


def _header(kind: str, columns, cfg: ScenarioConfig | None = None) -> str:
    lines = [f"stacool {kind} schema v{SCHEMA_VERSION}"]
    if cfg is not None:
        lines.append("config: " + " ".join(f"{k}={v}" for k, v in cfg.as_dict().items()))
    lines.append(",".join(columns))
    return "\n".join(lines)


def _save(path, data, header):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, data, delimiter=",", fmt="%.12e", header=header, comments="# ")
    return path


def write_timeseries(path, cfg: ScenarioConfig, result: RunResult) -> Path:
    """CSV with columns ``t, P1, P2, Pb, J, G2, theta, theta_dot, R``."""
    tab = cfg.schedule().table(result.times)
    data = np.column_stack(
        [result.times, result.P1, result.P2, result.Pb, tab["J"], tab["G2"], tab["theta"],
         tab["theta_dot"], tab["R"]]
    )
    return _save(path, data, _header("timeseries", TIMESERIES_COLUMNS, cfg))


def write_drives(path, cfg: ScenarioConfig, drives: dv.DrivePair) -> Path:
    """CSV with columns ``t, Re/Im Omega1, Re/Im Omega2`` (zeros when Omega1 is absent)."""
    om1 = drives.Omega1 if drives.Omega1 is not None else np.zeros_like(drives.Omega2)
    data = np.column_stack([drives.t, om1.real, om1.imag, drives.Omega2.real, drives.Omega2.imag])
    return _save(path, data, _header("drives", DRIVE_COLUMNS, cfg))


def write_sweep(path, sweep: SweepResult) -> Path:
    """Matrix CSV: one row per detuning, one ``pb_final`` column per scenario."""
    cols = ["delta"] + [f"pb_final[{k}]" for k in sweep.labels] + [f"pb_min[{k}]" for k in sweep.labels]
    data = np.column_stack(
        [sweep.deltas] + [sweep.pb_final[k] for k in sweep.labels] + [sweep.pb_min[k] for k in sweep.labels]
    )
    return _save(path, data, _header("sweep", cols))


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Column names and data of a file written by this module."""
    lines = Path(path).read_text().splitlines()
    header = [ln[2:] for ln in lines if ln.startswith("# ")]
    if not header or not header[0].startswith("stacool "):
        raise ValueError(f"{path}: not a stacool CSV")
    version = int(header[0].rsplit("v", 1)[1])
    if version != SCHEMA_VERSION:
        raise ValueError(f"{path}: schema v{version}, expected v{SCHEMA_VERSION}")
    columns = header[-1].split(",")
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    return columns, data


def _summary(cfg: ScenarioConfig, result: RunResult) -> dict:
    fom = figures_of_merit(result)
    fom.update(
        mode=cfg.mode.value,
        family=cfg.family.value,
        T=cfg.protocol.T,
        t_start=result.t_start,
        duration=result.t_end - result.t_start,
        delta=cfg.system.delta,
        n0=cfg.n0,
        policy=list(cfg.policy),
        max_imag_number=result.diagnostics.get("max_imag_number"),
        min_number=result.diagnostics.get("min_number"),
        n_steps=result.diagnostics.get("n_steps"),
    )
    return fom


def run(cfg: ScenarioConfig, out_dir=None, *, stem: str | None = None, drives: bool = False) -> RunOutcome:
    """Run a scenario and optionally write its files.

    Parameters
    ----------
    out_dir : path, optional
        Where to write ``<stem>_timeseries.csv``, ``<stem>_summary.json`` and,
        if ``drives`` is set, ``<stem>_drives.csv``. Nothing is written when
        omitted.
    """
    result = simulate(cfg)
    summary = _summary(cfg, result)
    files = {}
    if out_dir is not None:
        stem = stem or cfg.label
        out_dir = Path(out_dir)
        files["timeseries"] = write_timeseries(out_dir / f"{stem}_timeseries.csv", cfg, result)
        files["summary"] = out_dir / f"{stem}_summary.json"
        files["summary"].write_text(_dumps(summary))
        if drives:
            pair = reconstruct(cfg, result.times)
            files["drives"] = write_drives(out_dir / f"{stem}_drives.csv", cfg, pair)
    return RunOutcome(config=cfg, result=result, summary=summary, files=files)


def reconstruct(cfg: ScenarioConfig, t_eval=None) -> dv.DrivePair:
    """Drive amplitudes for a scenario.

    Without the counterdiabatic channel the a1-b optomechanical coupling is
    off, so ``g1`` is treated as zero and only ``Omega2`` is produced.
    """
    sys = cfg.system
    if cfg.mode is not Mode.STA:
        sys = replace(sys, g1=0.0)
    return dv.reconstruct_drives(cfg.schedule(), sys, t_eval=t_eval, grid_points=cfg.grid_points)


def default_deltas(lo: float = -0.2, hi: float = 0.2, steps: int = 41) -> np.ndarray:
    """Symmetric detuning grid; 41 points over [-0.2, 0.2] by default."""
    return np.linspace(lo, hi, steps)


def _sweep_point(args):
    cfg, delta = args
    r = simulate(cfg.with_delta(delta))
    return r.pb_final, r.pb_min


def sweep_detuning(configs, deltas=None, *, workers: int | None = None) -> SweepResult:
    """One run per detuning per scenario.

    Parameters
    ----------
    configs : ScenarioConfig or sequence of them
    deltas : array_like, optional
        Defaults to :func:`default_deltas`.
    workers : int, optional
        Process count; ``None`` uses every available core, ``1`` runs inline.
    """
    if isinstance(configs, ScenarioConfig):
        configs = [configs]
    deltas = default_deltas() if deltas is None else np.asarray(deltas, dtype=float)
    if not np.all(np.isfinite(deltas)):
        raise ValueError("detuning grid must be finite")
    jobs = [(cfg, float(d)) for cfg in configs for d in deltas]
    workers = (os.cpu_count() or 1) if workers is None else int(workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            values = list(pool.map(_sweep_point, jobs))
    else:
        values = [_sweep_point(j) for j in jobs]
    n = len(deltas)
    pb_final, pb_min = {}, {}
    for i, cfg in enumerate(configs):
        chunk = values[i * n:(i + 1) * n]
        label = cfg.label
        if label in pb_final:
            label = f"{label}#{i}"
        pb_final[label] = np.array([v[0] for v in chunk])
        pb_min[label] = np.array([v[1] for v in chunk])
    return SweepResult(deltas=deltas, pb_final=pb_final, pb_min=pb_min)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def report(summaries) -> tuple[str, str]:
    """Combine run summaries into a JSON document and a text table.

    A ``speedup`` entry is added to every shortcut run whose family also
    has an adiabatic run in ``summaries``: the ratio of end-of-pulse times.

    Returns
    -------
    json_text, table_text
        Both deterministic for identical inputs.
    """
    rows = [dict(s) for s in summaries]
    if not rows:
        raise ValueError("report needs at least one run summary")
    slow = {r["family"]: r for r in rows if r.get("mode") == Mode.STIRAP.value}
    for r in rows:
        ref = slow.get(r.get("family"))
        if r.get("mode") != Mode.STIRAP.value and ref is not None:
            r["speedup"] = ref["duration"] / r["duration"]
    json_text = _dumps({"schema": SCHEMA_VERSION, "runs": rows})
    cols = ("label", "t_end", "pb_final", "pb_min", "t_ground", "speedup", "max_R", "max_theta_dot")
    lines = ["  ".join(f"{c:>14}" for c in cols)]
    for r in rows:
        cells = []
        for c in cols:
            v = r.get(c)
            if v is None:
                cells.append(f"{'-':>14}")
            elif isinstance(v, str):
                cells.append(f"{v:>14}")
            else:
                cells.append(f"{v:>14.6g}")
        lines.append("  ".join(cells))
    return json_text, "\n".join(lines) + "\n"


def load_summary(path) -> dict:
    return json.loads(Path(path).read_text())

