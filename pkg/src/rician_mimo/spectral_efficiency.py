"""Empirical (Monte Carlo) and exact spectral-efficiency evaluation.

Conventional combining is evaluated by Monte Carlo over channel draws with
the interference, estimation-error and noise terms computed as closed-form
conditional expectations given the estimates (no nested Monte Carlo).
Statistical combining needs no draws at all: its combiner and the SINR
expectations are deterministic functions of the long-term statistics.

Draws are seeded per trial from (master seed, trial index), so any subset of
SNR/tau points re-evaluated with the same seed sees identical channels
(common random numbers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import UserLinkProfile
from .combining import conventional_combiner, statistical_combiner
from .config import SystemConfig
from .estimation import build_estimator_multicell

Profiles = list[list[list[UserLinkProfile]]]  # [bs][cell][user]


@dataclass(frozen=True)
class MCPoint:
    """One evaluation point of the conventional Monte Carlo sweep."""

    tau: int
    rho_d: float
    rho_tr: float


@dataclass
class SEReport:
    """Per-user SE for one scheme at one operating point."""

    per_user_se: np.ndarray
    se_stderr: np.ndarray
    scheme: str  # conv_single | stat_single | conv_multi | stat_multi
    trials: int
    seed: int
    prelog: float
    sinr_samples: np.ndarray | None = None

    def __post_init__(self):
        if np.any(self.per_user_se < 0):
            raise ValueError("spectral efficiencies must be non-negative")


def _log_scale(config: SystemConfig) -> float:
    return 1.0 / math.log(2.0) if config.log_base == "base2" else 1.0


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


class _ScenarioArrays:
    """Stacked per-link statistics for fast per-trial sampling."""

    def __init__(self, profiles: Profiles):
        self.L = len(profiles)
        self.K = len(profiles[0][0])
        self.N = profiles[0][0][0].n_antennas
        self.sqrt_r = [
            [np.stack([p.sqrt_r for p in cell]) for cell in bs] for bs in profiles
        ]
        self.h_bar = [
            [np.stack([p.h_bar for p in cell]) for cell in bs] for bs in profiles
        ]


class _EstimatorArrays:
    """Stacked estimator matrices for one (tau, rho_tr) pair."""

    def __init__(self, profiles: Profiles, tau: int, rho_tr: float):
        L = len(profiles)
        K = len(profiles[0][0])
        N = profiles[0][0][0].n_antennas
        self.tau_rho = tau * rho_tr
        self.gain = []  # per bs: (K, N, N) local estimation gains
        self.cross_gain = []  # per bs: dict cell -> (K, N, N)
        self.a_mat = []  # per bs: combiner regularizer
        self.b_mat = []  # per bs: conditional error + interference covariance
        self.err_cov = []  # per bs: (K, N, N)
        self.r_tilde = []  # per bs: (K, N, N)
        self.phi = []  # per bs: (K, N, N)
        for j in range(L):
            states = [
                build_estimator_multicell([profiles[j][ell][k] for ell in range(L)], j, tau, rho_tr)
                for k in range(K)
            ]
            self.gain.append(np.stack([s.gain for s in states]))
            self.phi.append(np.stack([s.phi for s in states]))
            self.err_cov.append(np.stack([s.err_cov for s in states]))
            self.r_tilde.append(np.stack([s.r_tilde for s in states]))
            cross = {
                ell: np.stack([states[k].cross_gains[ell] for k in range(K)])
                for ell in range(L)
                if ell != j
            }
            self.cross_gain.append(cross)
            err_sum = sum(s.err_cov for s in states)
            inter_r = sum(
                profiles[j][ell][k].r_cov for ell in range(L) if ell != j for k in range(K)
            )
            cond_sum = sum(
                states[k].cond_covs[ell] for ell in range(L) if ell != j for k in range(K)
            )
            self.a_mat.append(err_sum + (inter_r if L > 1 else 0.0))
            self.b_mat.append(err_sum + (cond_sum if L > 1 else 0.0))


def _batched_matvec(mats: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    # mats: (K, N, N), vecs: (K, N) -> (K, N)
    return np.matmul(mats, vecs[:, :, None])[:, :, 0]


def _build_est_cache(
    profiles: Profiles, points: list[MCPoint]
) -> dict[tuple[int, float], _EstimatorArrays]:
    est_cache: dict[tuple[int, float], _EstimatorArrays] = {}
    for pt in points:
        key = (pt.tau, pt.rho_tr)
        if key not in est_cache:
            est_cache[key] = _EstimatorArrays(profiles, pt.tau, pt.rho_tr)
    return est_cache


def mc_log_moments(
    profiles: Profiles,
    points: list[MCPoint],
    seed: int,
    trial_start: int,
    trial_count: int,
    _prebuilt: tuple[_ScenarioArrays, dict] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Sum and sum of squares of log(1+SINR) over a contiguous trial range.

    Each trial is seeded from (seed, trial index) alone, so chunking the
    trial range over workers and reducing the sums in chunk order gives the
    same result as one serial pass.
    """
    if _prebuilt is None:
        arr = _ScenarioArrays(profiles)
        est_cache = _build_est_cache(profiles, points)
    else:
        arr, est_cache = _prebuilt
    L, K, N = arr.L, arr.K, arr.N
    logs = np.zeros((len(points), L, trial_count, K))
    for idx in range(trial_count):
        t = trial_start + idx
        rng = _trial_rng(seed, t)
        z = [
            [
                (rng.standard_normal((K, N)) + 1j * rng.standard_normal((K, N))) / math.sqrt(2.0)
                for _ in range(L)
            ]
            for _ in range(L)
        ]
        w = [
            (rng.standard_normal((K, N)) + 1j * rng.standard_normal((K, N))) / math.sqrt(2.0)
            for _ in range(L)
        ]
        h = [
            [_batched_matvec(arr.sqrt_r[j][ell], z[j][ell]) + arr.h_bar[j][ell] for ell in range(L)]
            for j in range(L)
        ]
        # estimates and conditional interference means per (tau, rho_tr) group
        per_key: dict[tuple[int, float], tuple] = {}
        for key, est in est_cache.items():
            h_hat = []
            cond_mean = []
            for j in range(L):
                y = sum(h[j][ell] for ell in range(L)) + w[j] / math.sqrt(est.tau_rho)
                centered = y - arr.h_bar[j][j]
                h_hat.append(arr.h_bar[j][j] + _batched_matvec(est.gain[j], centered))
                cond_mean.append(
                    {
                        ell: _batched_matvec(cg, centered)
                        for ell, cg in est.cross_gain[j].items()
                    }
                )
            per_key[key] = (h_hat, cond_mean)
        for p_idx, pt in enumerate(points):
            est = est_cache[(pt.tau, pt.rho_tr)]
            h_hat, cond_mean = per_key[(pt.tau, pt.rho_tr)]
            for j in range(L):
                hh = h_hat[j].T  # (N, K)
                comb = conventional_combiner(hh, est.a_mat[j], pt.rho_d)
                g = comb.vectors
                gh = g.conj().T
                p_mat = gh @ hh  # p[k, i] = g_k^H h_hat_i
                sig = np.abs(np.diag(p_mat)) ** 2
                intra = np.sum(np.abs(p_mat) ** 2, axis=1) - sig
                err = np.real(np.sum(g.conj() * (est.b_mat[j] @ g), axis=0))
                inter = np.zeros(K)
                for ell, means in cond_mean[j].items():
                    inter += np.sum(np.abs(gh @ means.T) ** 2, axis=1)
                noise = (N / pt.rho_d) * np.sum(np.abs(g) ** 2, axis=0)
                sinr = sig / (intra + err + inter + noise)
                logs[p_idx, j, idx] = np.log1p(sinr)
    return np.sum(logs, axis=2), np.sum(logs**2, axis=2)


def _chunk_ranges(trials: int) -> list[tuple[int, int]]:
    # fixed chunk layout regardless of worker count, so the floating-point
    # reduction order (and hence the output bytes) never depends on it
    n_chunks = min(trials, 16)
    base, extra = divmod(trials, n_chunks)
    ranges = []
    start = 0
    for c in range(n_chunks):
        count = base + (1 if c < extra else 0)
        ranges.append((start, count))
        start += count
    return ranges


def conventional_mc(
    profiles: Profiles,
    points: list[MCPoint],
    coherence_len: int,
    trials: int,
    seed: int,
    log_scale: float = 1.0,
    workers: int = 1,
) -> list[list[SEReport]]:
    """Monte Carlo SE of conventional combining, all cells, all points.

    Returns reports[point][bs].  Estimators are shared between points with
    equal (tau, rho_tr); channel and pilot-noise draws are shared by all
    points of a trial.  With workers > 1 the trial range is fanned out to a
    process pool; the reduction order is fixed so results do not depend on
    the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    L = len(profiles)
    K = len(profiles[0][0])
    ranges = _chunk_ranges(trials)
    if workers > 1 and trials > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    _moments_task,
                    [(profiles, points, seed, start, count) for start, count in ranges],
                )
            )
    else:
        # build the (expensive) estimator matrices once and share them across
        # chunks; the chunked reduction order matches the pooled path exactly
        prebuilt = (_ScenarioArrays(profiles), _build_est_cache(profiles, points))
        parts = [
            mc_log_moments(profiles, points, seed, start, count, _prebuilt=prebuilt)
            for start, count in ranges
        ]
    sums = sum(p[0] for p in parts)
    sumsqs = sum(p[1] for p in parts)
    out = []
    for p_idx, pt in enumerate(points):
        prelog = 1.0 - pt.tau / coherence_len
        per_bs = []
        for j in range(L):
            mean = sums[p_idx, j] / trials
            if trials > 1:
                var = np.maximum(sumsqs[p_idx, j] - trials * mean**2, 0.0) / (trials - 1)
            else:
                var = np.zeros(K)
            se = prelog * mean * log_scale
            stderr = prelog * np.sqrt(var / trials) * log_scale
            per_bs.append(
                SEReport(
                    per_user_se=se,
                    se_stderr=stderr,
                    scheme="conv_single" if L == 1 else "conv_multi",
                    trials=trials,
                    seed=seed,
                    prelog=prelog,
                )
            )
        out.append(per_bs)
    return out


def _moments_task(args):
    return mc_log_moments(*args)


def se_conv_singlecell_mc(
    profiles: list[UserLinkProfile],
    config: SystemConfig,
    trials: int,
    seed: int,
) -> SEReport:
    points = [MCPoint(config.training_len, config.snr_data, config.snr_training)]
    reports = conventional_mc(
        [[profiles]], points, config.coherence_len, trials, seed, _log_scale(config)
    )
    return reports[0][0]


def se_conv_multicell_mc(
    profiles: Profiles,
    config: SystemConfig,
    trials: int,
    seed: int,
) -> list[SEReport]:
    points = [MCPoint(config.training_len, config.snr_data, config.snr_training)]
    reports = conventional_mc(
        profiles, points, config.coherence_len, trials, seed, _log_scale(config)
    )
    return reports[0]


def _stat_report(
    local: list[UserLinkProfile],
    interference_cov: np.ndarray,
    rho_d: float,
    scheme: str,
    log_scale: float,
) -> SEReport:
    n = local[0].n_antennas
    comb = statistical_combiner(local, rho_d)
    g = comb.vectors
    h_bar = np.column_stack([p.h_bar for p in local])
    num = np.abs(np.sum(g.conj() * h_bar, axis=0)) ** 2
    base = interference_cov + (n / rho_d) * np.eye(n)
    quad = np.real(np.sum(g.conj() * (base @ g), axis=0))
    own = np.abs(np.sum(g.conj() * h_bar, axis=0)) ** 2  # g_k^H h_bar_k h_bar_k^H g_k
    den = quad - own
    sinr = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    se = np.log1p(sinr) * log_scale
    return SEReport(
        per_user_se=se,
        se_stderr=np.zeros_like(se),
        scheme=scheme,
        trials=0,
        seed=0,
        prelog=1.0,
    )


def se_stat_singlecell(profiles: list[UserLinkProfile], config: SystemConfig) -> SEReport:
    """Exact SE of single-cell statistical combining (no Monte Carlo needed).

    Uses E[h_i h_i^H] = R_i + h_bar_i h_bar_i^H for every user; the served
    user's LoS outer product is excluded from the interference.
    """
    cov = sum(p.r_cov + np.outer(p.h_bar, p.h_bar.conj()) for p in profiles)
    return _stat_report(profiles, cov, config.snr_data, "stat_single", _log_scale(config))


def se_stat_multicell(profiles: Profiles, config: SystemConfig) -> list[SEReport]:
    """Exact SE of statistical combining under full inter-cell interference."""
    L = len(profiles)
    reports = []
    for j in range(L):
        cov = sum(
            profiles[j][ell][i].r_cov
            + np.outer(profiles[j][ell][i].h_bar, profiles[j][ell][i].h_bar.conj())
            for ell in range(L)
            for i in range(len(profiles[j][ell]))
        )
        rep = _stat_report(
            profiles[j][j], cov, config.snr_data,
            "stat_single" if L == 1 else "stat_multi", _log_scale(config),
        )
        reports.append(rep)
    return reports
