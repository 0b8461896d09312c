"""Command-line entry point for the simulation experiments.

Subcommands:
  simulate      Monte Carlo evaluation over the scenario's SNR grid
  asymptotic    deterministic equivalents only (no channel draws)
  optimize-tau  optimal training length per SNR point
  sweep         sweep one axis (snr, kappa_max, n_antennas, tau)
  reproduce     run a built-in figure preset and print its summary

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O
error.  Worker count defaults to $RICIAN_MIMO_WORKERS (1 if unset).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .config import ConfigError
from .presets import PRESET_IDS, run_preset
from .results import ResultRow, emit_results, render_csv, render_json
from .scenarios import ScenarioSpec, build_scenario, parse_scenario
from .sweeps import MODES, SWEEP_AXES, run_sweep
from .training import solve_tau_star

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _parse_snr(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--snr expects lo:hi:step, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ConfigError("--snr needs step > 0 and hi >= lo")
    count = int(round((hi - lo) / step))
    return tuple(lo + i * step for i in range(count + 1))


def _parse_schemes(text: str) -> tuple[str, ...]:
    schemes = tuple(s.strip() for s in text.split(",") if s.strip())
    for s in schemes:
        if s not in ("conv", "stat"):
            raise ConfigError(f"unknown scheme {s!r}; expected conv and/or stat")
    if not schemes:
        raise ConfigError("--schemes must name at least one scheme")
    return schemes


def _load_spec(args) -> ScenarioSpec:
    if args.scenario:
        try:
            with open(args.scenario, "r", encoding="utf-8") as fh:
                spec = parse_scenario(fh.read())
        except OSError as exc:
            raise _IOFailure(str(exc)) from exc
    else:
        spec = ScenarioSpec()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.snr is not None:
        overrides["snr_grid_db"] = _parse_snr(args.snr)
    if args.bits:
        overrides["log_base"] = "base2"
    return dataclasses.replace(spec, **overrides) if overrides else spec


class _IOFailure(Exception):
    pass


def _emit(rows: list[ResultRow], args) -> None:
    if not rows:
        raise ConfigError("nothing to emit: empty result set")
    try:
        if args.out:
            emit_results(rows, args.format, args.out)
        else:
            text = render_csv(rows) if args.format == "csv" else render_json(rows)
            sys.stdout.write(text)
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", help="scenario config file (key = value lines)")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    parser.add_argument("--snr", help="override the SNR grid as lo:hi:step in dB")
    parser.add_argument("--bits", action="store_true", help="report SE in bits (log2)")
    parser.add_argument("--out", help="output path (stdout if omitted)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--workers", type=int, default=None, help="worker processes")
    parser.add_argument("--schemes", default="conv,stat", help="comma list: conv,stat")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rician-mimo",
        description="Uplink SE experiments for correlated Rician massive MIMO",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("simulate", "Monte Carlo SE over the scenario SNR grid"),
        ("asymptotic", "deterministic-equivalent SE only"),
        ("optimize-tau", "optimal training length per SNR point"),
        ("sweep", "sweep one axis"),
        ("reproduce", "run a built-in figure preset"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "sweep":
            p.add_argument("--axis", choices=SWEEP_AXES, default="snr")
            p.add_argument("--values", help="comma list of axis values (non-snr axes)")
            p.add_argument("--mode", choices=MODES, default="both")
        if name == "reproduce":
            p.add_argument("--figure", choices=PRESET_IDS, required=True)
    return parser


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    return max(1, int(os.environ.get("RICIAN_MIMO_WORKERS", "1")))


def _cmd_simulate(args, mode: str) -> int:
    spec = _load_spec(args)
    rows = run_sweep(
        spec,
        schemes=_parse_schemes(args.schemes),
        sweep_axis="snr",
        mode=mode,
        workers=_workers(args),
    )
    _emit(rows, args)
    return EXIT_OK


def _cmd_optimize_tau(args) -> int:
    spec = _load_spec(args)
    scenario = build_scenario(spec)
    rows = []
    for snr in spec.snr_grid_db:
        config = spec.system_config(snr)
        sol = solve_tau_star(scenario.local_profiles(0), config)
        rows.append(
            ResultRow(
                scenario_id=spec.scenario_id,
                scheme="tau_star",
                snr_db=float(snr),
                user_id=0,
                se_value=float(sol.avg_se_at_star),
                se_stderr=None,
                se_de=float(sol.tau_continuous),
                tau_used=sol.tau_star,
                prelog=1.0 - sol.tau_star / spec.t,
                seed=spec.seed,
            )
        )
    _emit(rows, args)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = _load_spec(args)
    values = None
    if args.values:
        values = tuple(float(v) for v in args.values.split(","))
    rows = run_sweep(
        spec,
        schemes=_parse_schemes(args.schemes),
        sweep_axis=args.axis,
        axis_values=values,
        mode=args.mode,
        workers=_workers(args),
    )
    _emit(rows, args)
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    rows, summary = run_preset(
        args.figure, trials=args.trials, seed=args.seed, workers=_workers(args)
    )
    if args.out:
        try:
            emit_results(rows, args.format, args.out)
        except OSError as exc:
            raise _IOFailure(str(exc)) from exc
        sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    else:
        _emit(rows, args)
        sys.stderr.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args, "mc")
        if args.command == "asymptotic":
            return _cmd_simulate(args, "de")
        if args.command == "optimize-tau":
            return _cmd_optimize_tau(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_reproduce(args)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except _IOFailure as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
