"""Command-line entry point.

    stacool simulate CONFIG [--out DIR] [--drives]
    stacool sweep CONFIG [--delta-min X] [--delta-max X] [--steps N] [--workers N] [--out DIR]
    stacool check CONFIG
    stacool drives CONFIG [--out DIR]
    stacool report SUMMARY.json [SUMMARY.json ...] [--out FILE]

Exit status is 0 on success, 2 for configuration errors and 3 when an
integration fails.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .. import drives as dv
from .. import protocols as pr
from ..errors import ConfigError, DomainError, IntegrationError, StacoolError
from ..spectral import max_theta_dot
from . import runner
from .config import PolicyWarning, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3


def _cmd_simulate(args):
    cfg = load_config(args.config)
    out = runner.run(cfg, args.out, stem=Path(args.config).stem, drives=args.drives)
    _, table = runner.report([out.summary])
    print(table, end="")
    for kind, path in out.files.items():
        print(f"wrote {kind}: {path}")


def _cmd_sweep(args):
    cfg = load_config(args.config)
    deltas = runner.default_deltas(args.delta_min, args.delta_max, args.steps)
    sweep = runner.sweep_detuning(cfg, deltas, workers=args.workers)
    path = runner.write_sweep(Path(args.out) / f"{Path(args.config).stem}_sweep.csv", sweep)
    label = sweep.labels[0]
    for d, pf, pm in zip(sweep.deltas, sweep.pb_final[label], sweep.pb_min[label]):
        print(f"delta={d:+.4f}  pb_final={pf:.6g}  pb_min={pm:.6g}")
    print(f"wrote sweep: {path}")


def _cmd_check(args):
    cfg = load_config(args.config)
    p = cfg.protocol
    grid = p.grid(20001)
    R = pr.adiabatic_ratio(p, grid, cfg.system.delta)
    info = {
        "label": cfg.label,
        "window": [p.t_start, p.t_end],
        "ratio_start": float(pr.coupling_ratio(p, p.t_start)),
        "ratio_end": float(pr.coupling_ratio(p, p.t_end)),
        "max_R": float(np.max(R)),
        "max_theta_dot": max_theta_dot(p),
        "g": p.g,
        "policy": list(cfg.policy),
    }
    if cfg.mode.value == "sta":
        info["self_consistency"] = dv.self_consistency(cfg.schedule(), cfg.system)
    print(json.dumps(info, indent=2, sort_keys=True))


def _cmd_drives(args):
    cfg = load_config(args.config)
    pair = runner.reconstruct(cfg)
    path = runner.write_drives(Path(args.out) / f"{Path(args.config).stem}_drives.csv", cfg, pair)
    if pair.Omega1 is not None:
        print(f"max |Omega1| = {np.max(np.abs(pair.Omega1)):.6g}")
    print(f"max |Omega2| = {np.max(np.abs(pair.Omega2)):.6g}")
    print(f"wrote drives: {path}")


def _cmd_report(args):
    summaries = [runner.load_summary(p) for p in args.summaries]
    json_text, table = runner.report(summaries)
    if args.out:
        Path(args.out).write_text(json_text)
        print(f"wrote report: {args.out}")
    print(table, end="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stacool", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and write its time series")
    p.add_argument("config")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--drives", action="store_true", help="also write reconstructed drives")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="scan the detuning delta")
    p.add_argument("config")
    p.add_argument("--delta-min", type=float, default=-0.2)
    p.add_argument("--delta-max", type=float, default=0.2)
    p.add_argument("--steps", type=int, default=41)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("check", help="print diagnostics without integrating")
    p.add_argument("config")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("drives", help="reconstruct the pulsed drive amplitudes")
    p.add_argument("config")
    p.add_argument("--out", default=".")
    p.set_defaults(func=_cmd_drives)

    p = sub.add_parser("report", help="tabulate summary files from earlier runs")
    p.add_argument("summaries", nargs="+")
    p.add_argument("--out", default=None, help="write the combined JSON report here")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PolicyWarning)
        try:
            args.func(args)
            status = EXIT_OK
        except (ConfigError, DomainError, FileNotFoundError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            status = EXIT_CONFIG
        except StacoolError as exc:
            kind = "integration error" if isinstance(exc, IntegrationError) else "error"
            print(f"{kind}: {exc}", file=sys.stderr)
            status = EXIT_INTEGRATION
    for w in caught:
        if issubclass(w.category, PolicyWarning):
            print(f"warning: {w.message}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
