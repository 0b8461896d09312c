"""Experiment orchestration: evaluate schemes over a sweep axis.

A sweep walks one axis (snr, kappa_max, n_antennas, tau), evaluates the
requested schemes in the requested mode (Monte Carlo, deterministic
equivalent, or both) and returns flat result rows.  All Monte Carlo points
of one scenario share channel draws (common random numbers), so curves over
SNR or tau are smooth functions of the same randomness.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .asymptotics import (
    build_q_multicell,
    build_q_singlecell,
    se_conv_multicell_de,
    se_conv_singlecell_de,
    se_stat_multicell_de,
    se_stat_singlecell_de,
)
from .config import ConfigError
from .estimation import build_estimator_multicell
from .results import ResultRow
from .scenarios import Scenario, ScenarioSpec, build_scenario
from .spectral_efficiency import (
    MCPoint,
    conventional_mc,
    se_stat_multicell,
    se_stat_singlecell,
)
from .training import solve_tau_star

SWEEP_AXES = ("snr", "kappa_max", "n_antennas", "tau")
SCHEMES = ("conv", "stat")
MODES = ("mc", "de", "both")


def _log_scale_value(spec: ScenarioSpec) -> float:
    return 1.0 / np.log(2.0) if spec.log_base == "base2" else 1.0


def resolve_tau_for_snr(scenario: Scenario, snr_db: float) -> int:
    """Training length at one SNR point, honoring the spec's tau_mode."""
    spec = scenario.spec
    if spec.tau_mode == "optimal":
        config = spec.system_config(snr_db)
        return solve_tau_star(scenario.local_profiles(0), config).tau_star
    return spec.resolve_tau()


def _local_estimators(scenario: Scenario, bs: int, tau: int, rho_tr: float):
    L = scenario.n_cells
    return [
        build_estimator_multicell(
            [scenario.profiles[bs][ell][k] for ell in range(L)], bs, tau, rho_tr
        )
        for k in range(scenario.n_users)
    ]


def conv_de_per_bs(scenario: Scenario, config) -> list[np.ndarray]:
    """Deterministic-equivalent conventional SE, one array per BS."""
    # the second-order fluctuation corrections assume covariances whose
    # spectra stay O(1); the one-ring family concentrates its mass on a
    # narrow angular subspace and the corrections can overshoot into
    # negative SINRs there, so those scenarios use the plain equivalents
    refined = scenario.spec.correlation != "one_ring"
    out = []
    for bs in range(scenario.n_cells):
        estimators = _local_estimators(scenario, bs, config.training_len, config.snr_training)
        if scenario.n_cells == 1:
            state = build_q_singlecell(
                scenario.local_profiles(bs), estimators, config.snr_data, refined=refined
            )
            out.append(se_conv_singlecell_de(state, config))
        else:
            state = build_q_multicell(
                scenario.profiles[bs], estimators, bs, config.snr_data, refined=refined
            )
            out.append(se_conv_multicell_de(state, config).se)
    return out


def stat_de_per_bs(scenario: Scenario, config) -> list[np.ndarray]:
    """Deterministic-equivalent statistical SE, one array per BS."""
    if scenario.n_cells == 1:
        full, _ = se_stat_singlecell_de(scenario.local_profiles(0), config)
        return [full]
    return [
        se_stat_multicell_de(scenario.local_profiles(bs), config)
        for bs in range(scenario.n_cells)
    ]


def _rows_for_scenario(
    scenario: Scenario,
    schemes: tuple[str, ...],
    mode: str,
    trials: int,
    seed: int,
    workers: int,
) -> list[ResultRow]:
    spec = scenario.spec
    k = scenario.n_users
    multi = scenario.n_cells > 1
    taus = {snr: resolve_tau_for_snr(scenario, snr) for snr in spec.snr_grid_db}
    rows: list[ResultRow] = []
    conv_mc_reports = None
    if "conv" in schemes and mode in ("mc", "both"):
        points = [
            MCPoint(
                tau=taus[snr],
                rho_d=spec.system_config(snr).snr_data,
                rho_tr=spec.system_config(snr).snr_training,
            )
            for snr in spec.snr_grid_db
        ]
        reports = conventional_mc(
            scenario.profiles,
            points,
            spec.t,
            trials,
            seed,
            _log_scale_value(spec),
            workers=workers,
        )
        conv_mc_reports = dict(zip(spec.snr_grid_db, reports))
    for snr in spec.snr_grid_db:
        config = spec.system_config(snr, tau=taus[snr])
        for scheme in schemes:
            if scheme == "conv":
                name = "conv_multi" if multi else "conv_single"
                de = conv_de_per_bs(scenario, config) if mode in ("de", "both") else None
                mc = conv_mc_reports[snr] if conv_mc_reports is not None else None
                tau_used, prelog = taus[snr], config.prelog
            else:
                name = "stat_multi" if multi else "stat_single"
                de = stat_de_per_bs(scenario, config) if mode in ("de", "both") else None
                mc = None
                if mode in ("mc", "both"):
                    if multi:
                        mc = se_stat_multicell(scenario.profiles, config)
                    else:
                        mc = [se_stat_singlecell(scenario.local_profiles(0), config)]
                tau_used, prelog = 0, 1.0
            for bs in range(scenario.n_cells):
                for u in range(k):
                    if mc is not None:
                        se_value = float(mc[bs].per_user_se[u])
                        stderr = float(mc[bs].se_stderr[u]) if mc[bs].trials > 0 else None
                    else:
                        se_value = float(de[bs][u])
                        stderr = None
                    rows.append(
                        ResultRow(
                            scenario_id=spec.scenario_id,
                            scheme=name,
                            snr_db=float(snr),
                            user_id=bs * k + u,
                            se_value=se_value,
                            se_stderr=stderr,
                            se_de=float(de[bs][u]) if (de is not None and mc is not None) else None,
                            tau_used=tau_used,
                            prelog=prelog,
                            seed=seed,
                        )
                    )
    return rows


def run_sweep(
    spec: ScenarioSpec,
    schemes: tuple[str, ...] = ("conv", "stat"),
    sweep_axis: str = "snr",
    axis_values: tuple[float, ...] | None = None,
    mode: str = "both",
    workers: int = 1,
    trials: int | None = None,
    seed: int | None = None,
) -> list[ResultRow]:
    """Evaluate all schemes over the sweep axis; rows sorted by
    (axis point, SNR, scheme, user)."""
    if sweep_axis not in SWEEP_AXES:
        raise ConfigError(f"sweep_axis must be one of {SWEEP_AXES}, got {sweep_axis!r}")
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {scheme!r}")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    trials = spec.trials if trials is None else trials
    seed = spec.seed if seed is None else seed
    if sweep_axis == "snr":
        variants = [spec]
    else:
        if not axis_values:
            raise ConfigError(f"sweep over {sweep_axis} needs explicit axis values")
        variants = []
        for value in axis_values:
            sid = f"{spec.scenario_id}-{sweep_axis}={value:g}"
            if sweep_axis == "kappa_max":
                variants.append(
                    dataclasses.replace(spec, kappa_max=float(value), scenario_id=sid)
                )
            elif sweep_axis == "n_antennas":
                variants.append(dataclasses.replace(spec, n=int(value), scenario_id=sid))
            else:  # tau
                variants.append(
                    dataclasses.replace(
                        spec, tau_mode="fixed", tau=int(value), scenario_id=sid
                    )
                )
    rows: list[ResultRow] = []
    for variant in variants:
        scenario = build_scenario(variant)
        rows.extend(
            _rows_for_scenario(scenario, tuple(schemes), mode, trials, seed, workers)
        )
    return rows
