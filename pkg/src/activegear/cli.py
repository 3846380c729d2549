"""Command-line front end: ``activegear {simulate,tune,compare,default-config}``.

Exit codes: 0 success, 1 configuration error, 2 runtime/integration error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import os
import sys
import tempfile
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .config import ConfigError, ExperimentConfig, dumps_config, load_config
from .dynamics import COORD_NAMES, IntegrationError, StepBudgetError, Trajectory, strut_map
from .objectives import evaluate_objective, force_signals
from .optimizer import write_convergence
from .scenarios import METRICS, ComparisonError, metric_signals, run_comparison, run_configuration
from .analysis import rms
from .tuning import tune_controller

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


TRAJECTORY_COLUMNS = (["t"] + list(COORD_NAMES) + [f"{n}_dot" for n in COORD_NAMES]
                      + [f"{n}_ddot" for n in COORD_NAMES] + ["f1", "f2", "f3", "rd_f", "Fs1", "Ft1"])


def trajectory_csv(traj: Trajectory, params) -> str:
    rd_f = traj.coords @ strut_map(params)[0]
    fs = force_signals(traj, params)
    table = np.column_stack([traj.times, traj.states, traj.accelerations, traj.control_forces,
                             rd_f, fs.suspension[:, 0], fs.tyre[:, 0]])
    return _csv_text(TRAJECTORY_COLUMNS, table.tolist())


def cmd_simulate(cfg: ExperimentConfig, out_dir: Path) -> List[Path]:
    """Trajectory CSV per configuration plus an RMS/objective table."""
    written = []
    labels, columns = [], []
    for config in cfg.configurations:
        used, traj = run_configuration(cfg.scenario, config, cfg.aircraft)
        path = out_dir / f"trajectory_{config.label}.csv"
        write_atomic(path, trajectory_csv(traj, used))
        written.append(path)
        signals = metric_signals(traj, used, cfg.gear)
        values = [rms(signals[m]) for m in METRICS]
        values += [evaluate_objective(k, traj, used, cfg.optimizer.weights(k)) for k in (1, 2)]
        labels.append(config.label)
        columns.append(values)
    names = list(METRICS) + ["itae_type1", "itae_type2"]
    rows = [[name] + [col[i] for col in columns] for i, name in enumerate(names)]
    path = out_dir / f"metrics_{cfg.scenario.name}.csv"
    write_atomic(path, _csv_text(["metric"] + labels, rows))
    written.append(path)
    return written


def cmd_tune(cfg: ExperimentConfig, out_dir: Path, objective_type: Optional[int] = None) -> List[Path]:
    """Bees tuning; writes the tuned configuration as a config file plus convergence CSV."""
    k = objective_type or cfg.optimizer.objective_type
    opt = cfg.optimizer
    result = tune_controller(cfg.scenario, k, space=opt.search_space, cfg=cfg.bees(),
                             params=cfg.aircraft, force_mode=opt.force_mode,
                             weights=opt.weights(k), inject_baseline=opt.inject_baseline,
                             workers=opt.workers, label=f"ba{k}_tuned")
    conv = io.StringIO()
    write_convergence(conv, result.optimization)
    conv_path = out_dir / f"convergence_type{k}.csv"
    write_atomic(conv_path, conv.getvalue())
    tuned = dataclasses.replace(cfg, configurations=(result.configuration,),
                                optimizer=dataclasses.replace(opt, objective_type=k))
    tuned_path = out_dir / f"tuned_type{k}.json"
    write_atomic(tuned_path, dumps_config(tuned))
    return [conv_path, tuned_path]


def cmd_compare(cfg: ExperimentConfig, out_dir: Path) -> List[Path]:
    """RMS and improvement table plus one PSD CSV per metric and configuration."""
    if len(cfg.configurations) < 2:
        raise ConfigError("configurations: need ≥2 configurations for a comparison")
    if "passive" not in [c.label for c in cfg.configurations]:
        raise ConfigError("configurations: a comparison needs a configuration labelled 'passive'")
    report = run_comparison(cfg.scenario, cfg.configurations, cfg.aircraft, gear=cfg.gear,
                            workers=cfg.optimizer.workers)
    rows = [[m] + [report.rms[label][m] for label in report.labels] for m in METRICS]
    rows += [[f"improvement_{m}"] + [report.improvement[label][m] for label in report.labels]
             for m in METRICS]
    written = []
    path = out_dir / f"report_{cfg.scenario.name}.csv"
    write_atomic(path, _csv_text(["metric"] + report.labels, rows))
    written.append(path)
    for label in report.labels:
        for m in METRICS:
            spec = report.spectra[label][m]
            p = out_dir / f"psd_{m}_{label}.csv"
            write_atomic(p, _csv_text(["frequency_hz", "psd"], zip(spec.frequencies.tolist(), spec.psd.tolist())))
            written.append(p)
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="activegear",
                                     description="Active landing-gear touchdown simulation and Bees tuning.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("simulate", "simulate every configuration and write trajectories"),
                            ("tune", "tune gains and strut parameters with the Bees Algorithm"),
                            ("compare", "RMS / improvement / PSD comparison against passive")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="experiment config (JSON); defaults to the built-in experiment")
        p.add_argument("--out-dir", help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, help="random seed (overrides the config)")
        if name == "tune":
            p.add_argument("--objective", type=int, choices=(1, 2), help="objective type")
    sub.add_parser("default-config", help="print the built-in experiment config")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "default-config":
            sys.stdout.write(dumps_config(ExperimentConfig()))
            return EXIT_OK
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed: must be a non-negative integer")
            cfg = dataclasses.replace(cfg, seed=args.seed)
        out_dir = Path(args.out_dir or cfg.output_dir)
        if args.command == "simulate":
            written = cmd_simulate(cfg, out_dir)
        elif args.command == "tune":
            written = cmd_tune(cfg, out_dir, args.objective)
        else:
            written = cmd_compare(cfg, out_dir)
    except ConfigError as exc:
        print(f"activegear: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, StepBudgetError, ComparisonError, OSError, ValueError) as exc:
        print(f"activegear: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
