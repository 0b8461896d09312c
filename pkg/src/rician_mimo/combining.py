"""Receive combining vectors.

Two families: conventional combiners built from instantaneous channel
estimates plus an error/interference covariance regularizer, and statistical
combiners built only from long-term statistics (no training required).
Combiners are not normalized; every SINR downstream is scale-invariant in g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import UserLinkProfile


@dataclass
class CombinerSet:
    """K combining vectors (columns) plus the matrix that was inverted."""

    vectors: np.ndarray  # (N, K)
    kind: str  # "conventional" | "statistical"
    regularizer: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("combining vectors must be finite")


def _solve_hermitian(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # single factorization shared across all K right-hand sides
    return cho_solve(cho_factor(mat, lower=True), rhs)


def conventional_combiner(
    estimates: np.ndarray,
    regularizer: np.ndarray,
    rho_d: float,
) -> CombinerSet:
    """g_k = (H_hat H_hat^H + regularizer + (N/rho_d) I)^{-1} h_hat_k.

    `regularizer` is the Hermitian PSD design matrix: the sum of estimation
    error covariances in the single-cell case, plus the inter-cell covariances
    in the multi-cell case.
    """
    n = estimates.shape[0]
    mat = estimates @ estimates.conj().T + regularizer + (n / rho_d) * np.eye(n)
    return CombinerSet(
        vectors=_solve_hermitian(mat, estimates),
        kind="conventional",
        regularizer=mat,
    )


def conventional_combiner_singlecell(
    estimates: np.ndarray,
    err_cov_sum: np.ndarray,
    rho_d: float,
) -> CombinerSet:
    return conventional_combiner(estimates, err_cov_sum, rho_d)


def conventional_combiner_multicell(
    estimates: np.ndarray,
    a_matrix: np.ndarray,
    rho_d: float,
) -> CombinerSet:
    """Multi-cell variant; `a_matrix` = sum_i (R_jji - Rt_jji) + sum_{l!=j,i} R_jli."""
    return conventional_combiner(estimates, a_matrix, rho_d)


def statistical_combiner(profiles: list[UserLinkProfile], rho_d: float) -> CombinerSet:
    """g_bar_k = (sum_i R_i + Hbar_k Hbar_k^H + (N/rho_d) I)^{-1} h_bar_k.

    Hbar_k drops column k, so only the *other* users' LoS directions are
    whitened.  Uses local statistics only; a user with kappa = 0 gets the
    zero vector (its LoS numerator vanishes).
    """
    n = profiles[0].n_antennas
    h_bar = np.column_stack([p.h_bar for p in profiles])
    r_sum = sum(p.r_cov for p in profiles)
    base = r_sum + h_bar @ h_bar.conj().T + (n / rho_d) * np.eye(n)
    # one factorization of the full matrix; dropping column k from Hbar is a
    # rank-1 downdate, handled per user by Sherman-Morrison
    solved = _solve_hermitian(base, h_bar)
    quad = np.real(np.sum(h_bar.conj() * solved, axis=0))
    vectors = solved / (1.0 - quad)
    return CombinerSet(vectors=vectors, kind="statistical", regularizer=base)


# the single- and multi-cell statistical combiners share the same formula:
# the multi-cell receiver is deliberately oblivious to other cells.
statistical_combiner_singlecell = statistical_combiner
statistical_combiner_multicell = statistical_combiner
