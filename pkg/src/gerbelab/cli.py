"""Command line: ``gerbelab run <scenario>`` and ``gerbelab sweep <scenario>``.

Exit status is 0 when every check passes, 1 when a check fails or a
numerical error occurs, 2 on usage errors.  Reports are JSON; the
default output directory comes from ``GERBELAB_OUT_DIR`` (else the
current directory).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .scenarios import SCENARIOS, SWEEPS, ScenarioConfig, run, sweep

OUT_ENV = "GERBELAB_OUT_DIR"


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--level", type=int, help="mesh resolution (sphere level or torus size)")
    p.add_argument("--band", type=int, default=0)
    p.add_argument("--gap-tol", type=float, dest="gap_tol")
    p.add_argument("--T", type=float, help="base adiabatic time")
    p.add_argument("--steps", type=int, help="integrator steps per loop edge (>= 100)")
    p.add_argument("--k", type=int, help="gerbe level")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, help="override the scenario's main tolerance")
    p.add_argument("--out", help="report path (JSON)")
    p.add_argument("--csv", action="store_true", help="also write the convergence table as CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gerbelab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("scenario", choices=SCENARIOS)
    _add_common(p_run)
    p_sweep = sub.add_parser("sweep", help="convergence sweep with fitted order")
    p_sweep.add_argument("scenario", choices=SWEEPS)
    p_sweep.add_argument("--values", type=float, nargs="+", required=True,
                         help="levels (berry-sphere, constant) or times (adiabatic)")
    _add_common(p_sweep)
    return parser


def _output_path(cfg: ScenarioConfig, command: str) -> Path:
    if cfg.out:
        return Path(cfg.out)
    base = Path(os.environ.get(OUT_ENV, "."))
    return base / f"{command}-{cfg.scenario}.json"


def write_report(report, path: Path, with_csv: bool) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    if with_csv and report.convergence:
        with path.with_suffix(".csv").open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(report.convergence[0]))
            writer.writeheader()
            writer.writerows(report.convergence)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "values")}
    cfg = ScenarioConfig(**opts)
    try:
        report = sweep(cfg, args.values) if args.command == "sweep" else run(cfg)
    except ValueError as exc:
        print(f"gerbelab: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    path = _output_path(cfg, args.command)
    write_report(report, path, cfg.csv)
    for c in report.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.value} (tol {c.tolerance})")
    if report.error:
        print(f"[ERROR] {report.error}", file=sys.stderr)
    print(f"report: {path}  ({report.wall_time:.2f} s)")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
