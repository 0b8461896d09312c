#!/usr/bin/env python3
"""Cross-validate the deterministic equivalents against Monte Carlo.

Runs a seeded scenario over its SNR grid in `both` mode and prints, per SNR
point, the worst and mean per-user relative gap between the Monte Carlo SE
and the closed-form equivalent for conventional combining.

Usage:
    python3 scripts/compare_de_vs_mc.py [--multi] [--trials 200] [--seed 3]
"""

import argparse
import time

import numpy as np

from rician_mimo.scenarios import ScenarioSpec, build_scenario
from rician_mimo.spectral_efficiency import MCPoint, conventional_mc
from rician_mimo.sweeps import conv_de_per_bs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--multi", action="store_true", help="three-cell layout")
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--n", type=int, default=150)
    parser.add_argument("--k", type=int, default=20)
    parser.add_argument("--kappa-max", type=float, default=2.0)
    parser.add_argument("--correlation", default="exponential",
                        choices=("identity", "exponential", "one_ring"))
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    spec = ScenarioSpec(
        layout="three_cell_edge" if args.multi else "single_cell",
        l=3 if args.multi else 1,
        n=args.n,
        k=args.k,
        t=500,
        kappa_max=args.kappa_max,
        correlation=args.correlation,
        seed=args.seed,
        trials=args.trials,
    )
    scenario = build_scenario(spec)
    points = [
        MCPoint(spec.k, 10 ** (s / 10), 10 ** (s / 10)) for s in spec.snr_grid_db
    ]
    start = time.time()
    reports = conventional_mc(
        scenario.profiles, points, spec.t, args.trials, args.seed, workers=args.workers
    )
    mc_elapsed = time.time() - start

    print(f"scenario: {spec.layout}, N={spec.n}, K={spec.k}, "
          f"corr={spec.correlation}, kappa_max={spec.kappa_max:g}, "
          f"{args.trials} trials ({mc_elapsed:.0f}s)")
    print(f"{'snr_db':>7} {'worst_gap':>10} {'mean_gap':>9} {'mc_stderr':>10}")
    for i, snr in enumerate(spec.snr_grid_db):
        config = spec.system_config(snr, tau=spec.k)
        de = conv_de_per_bs(scenario, config)
        gaps = []
        stderrs = []
        for bs in range(scenario.n_cells):
            mc = reports[i][bs].per_user_se
            gaps.append(np.abs(mc - de[bs]) / de[bs])
            stderrs.append(reports[i][bs].se_stderr / mc)
        gap = np.concatenate(gaps)
        rel_err = np.concatenate(stderrs)
        print(f"{snr:>7.1f} {gap.max():>10.4f} {gap.mean():>9.4f} {rel_err.max():>10.4f}")


if __name__ == "__main__":
    main()
