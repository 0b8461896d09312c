"""LMMSE channel estimation from pilot observations.

Single-cell estimation inverts Phi = (R + I/(tau*rho_tr))^{-1}; the
multi-cell variant sums the covariances of every same-pilot link, which is
what creates pilot contamination.  All matrices that the Monte Carlo loop
needs per draw (gains, error covariances) are precomputed here, so the
per-trial work is matrix-vector only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import UserLinkProfile, standard_complex_normal


@dataclass
class EstimatorState:
    """Precomputed matrices for one (BS, pilot) pair.

    For the single-cell case `cross_gains`/`cond_covs` are empty.  In the
    multi-cell case they hold, for every same-pilot interfering cell l, the
    matrices R_{jlk} Phi_{jk} and R_{jlk} - R_{jlk} Phi_{jk} R_{jlk} used for
    the conditional interference statistics given the pilot observation.
    """

    local_index: int
    h_bar: np.ndarray
    tau_rho: float
    phi: np.ndarray
    gain: np.ndarray  # R_local @ phi
    r_tilde: np.ndarray
    err_cov: np.ndarray
    cross_gains: dict[int, np.ndarray] = field(default_factory=dict)
    cond_covs: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def n_antennas(self) -> int:
        return self.phi.shape[0]


def build_estimator_multicell(
    profiles: list[UserLinkProfile],
    local_index: int,
    tau: float,
    rho_tr: float,
) -> EstimatorState:
    """LMMSE estimator of the local link when all cells reuse the pilot.

    `profiles[l]` is the link from the same-pilot user of cell l to this BS;
    `profiles[local_index]` is the served user.
    """
    tau_rho = tau * rho_tr
    if tau_rho <= 0:
        raise ValueError("tau * rho_tr must be strictly positive")
    n = profiles[0].n_antennas
    if any(p.n_antennas != n for p in profiles):
        raise ValueError("all same-pilot profiles must share the antenna dimension")
    obs_cov = sum(p.r_cov for p in profiles) + (1.0 / tau_rho) * np.eye(n)
    phi = np.linalg.inv(obs_cov)
    phi = 0.5 * (phi + phi.conj().T)
    local = profiles[local_index]
    gain = local.r_cov @ phi
    r_tilde = gain @ local.r_cov
    r_tilde = 0.5 * (r_tilde + r_tilde.conj().T)
    state = EstimatorState(
        local_index=local_index,
        h_bar=local.h_bar,
        tau_rho=tau_rho,
        phi=phi,
        gain=gain,
        r_tilde=r_tilde,
        err_cov=local.r_cov - r_tilde,
    )
    for ell, p in enumerate(profiles):
        if ell == local_index:
            continue
        cg = p.r_cov @ phi
        state.cross_gains[ell] = cg
        cc = p.r_cov - cg @ p.r_cov
        state.cond_covs[ell] = 0.5 * (cc + cc.conj().T)
    return state


def build_estimator_singlecell(profile: UserLinkProfile, tau: float, rho_tr: float) -> EstimatorState:
    return build_estimator_multicell([profile], 0, tau, rho_tr)


def pilot_observation(
    state: EstimatorState,
    channels: list[np.ndarray],
    rng: np.random.Generator,
) -> np.ndarray:
    """Despread pilot observation: sum of same-pilot channels plus scaled noise."""
    noise = standard_complex_normal(rng, state.n_antennas)
    return sum(channels) + noise / np.sqrt(state.tau_rho)


def estimate_from_observation(state: EstimatorState, y_tr: np.ndarray) -> np.ndarray:
    """LMMSE estimate of the local channel given the pilot observation."""
    return state.h_bar + state.gain @ (y_tr - state.h_bar)


def conditional_means(state: EstimatorState, y_tr: np.ndarray) -> dict[int, np.ndarray]:
    """Conditional mean of each same-pilot interfering channel given y_tr."""
    centered = y_tr - state.h_bar
    return {ell: cg @ centered for ell, cg in state.cross_gains.items()}


def estimate_singlecell(
    profile: UserLinkProfile,
    state: EstimatorState,
    true_channel: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    y_tr = pilot_observation(state, [true_channel], rng)
    return estimate_from_observation(state, y_tr)


def estimate_multicell(
    state: EstimatorState,
    true_channels: list[np.ndarray],
    rng: np.random.Generator,
) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """Estimate the local link and return the interferers' conditional means."""
    y_tr = pilot_observation(state, true_channels, rng)
    return estimate_from_observation(state, y_tr), conditional_means(state, y_tr)
