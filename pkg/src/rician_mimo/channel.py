"""Per-link channel statistics and channel realizations.

A link (BS, cell, user) is described by a `UserLinkProfile` holding the
large-scale gain, Rician factor, spatial correlation and LoS direction.
Realizations are drawn as h = h_bar + R^{1/2} z with z standard complex
Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

# Negative eigenvalues larger than this (in magnitude, relative to the top
# eigenvalue) mean the matrix is genuinely indefinite, not just noisy.
PSD_EPS = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(2048)


class ChannelModelError(ValueError):
    pass


def one_ring_correlation(
    theta_min: float,
    theta_max: float,
    n: int,
    spacing_ratio: float = 0.5,
) -> np.ndarray:
    """One-ring spatial correlation for a uniform linear array.

    [Theta]_uv = 1/(theta_max - theta_min) * int exp(j*2*pi*spacing_ratio
    *(v-u)*cos(theta)) dtheta over [theta_min, theta_max].  Evaluated with a
    fixed 2048-point Gauss-Legendre rule, which resolves the oscillatory
    integrand to well below 1e-10 for the antenna counts used here.
    """
    if n < 1:
        raise ChannelModelError(f"n must be >= 1, got {n}")
    if not theta_max > theta_min:
        raise ChannelModelError("degenerate angular window: theta_max must exceed theta_min")
    half = 0.5 * (theta_max - theta_min)
    mid = 0.5 * (theta_max + theta_min)
    cos_t = np.cos(mid + half * _GL_NODES)
    w = _GL_WEIGHTS * (half / (theta_max - theta_min))
    d = np.arange(n)
    # first_row[d] = sum_q w_q exp(j*2*pi*spacing_ratio*d*cos(theta_q))
    first_row = np.exp(1j * 2.0 * np.pi * spacing_ratio * np.outer(d, cos_t)) @ w
    theta = toeplitz(np.conj(first_row), first_row)
    # force exact Hermitian symmetry against quadrature round-off
    theta = 0.5 * (theta + theta.conj().T)
    np.fill_diagonal(theta, 1.0)
    return theta


def exponential_correlation(rho: complex, n: int) -> np.ndarray:
    """Exponential correlation [Theta]_uv = rho^(v-u) for v >= u, |rho| < 1."""
    if abs(rho) >= 1:
        raise ChannelModelError(f"|rho| must be < 1 to keep the model PSD, got {abs(rho)}")
    first_row = np.asarray(rho, dtype=complex) ** np.arange(n)
    return toeplitz(np.conj(first_row), first_row)


def los_steering(theta: float, n: int) -> np.ndarray:
    """ULA steering vector [z]_m = exp(-j*(m-1)*pi*sin(theta)), 1-based m."""
    if n < 1:
        raise ChannelModelError(f"n must be >= 1, got {n}")
    return np.exp(-1j * np.pi * np.sin(theta) * np.arange(n))


def dft_steering(index: int, n: int) -> np.ndarray:
    """Column `index` of the size-n DFT matrix; unit-modulus entries and
    mutually orthogonal across indices (exact favorable propagation)."""
    return np.exp(-2j * np.pi * index * np.arange(n) / n)


def pathloss(distance: float, alpha: float) -> float:
    """Power pathloss distance^(-alpha)."""
    if distance <= 0:
        raise ChannelModelError(f"distance must be positive, got {distance}")
    return float(distance) ** (-alpha)


def _clamped_sqrt(mat: np.ndarray) -> np.ndarray:
    """Hermitian matrix square root with eigenvalues clamped at zero.

    Cholesky is deliberately avoided: quadrature-built correlation matrices
    are often numerically semi-definite.
    """
    eigval, eigvec = np.linalg.eigh(mat)
    scale = max(eigval[-1], 1.0)
    if eigval[0] < -PSD_EPS * scale:
        raise ChannelModelError(f"matrix is not PSD: min eigenvalue {eigval[0]:.3e}")
    return (eigvec * np.sqrt(np.clip(eigval, 0.0, None))) @ eigvec.conj().T


@dataclass
class UserLinkProfile:
    """Second-order statistics of one (BS, cell, user) link."""

    beta: float
    kappa: float
    theta: np.ndarray
    los_dir: np.ndarray
    is_local: bool = True
    r_cov: np.ndarray = field(init=False)
    h_bar: np.ndarray = field(init=False)
    _sqrt_r: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.beta <= 0:
            raise ChannelModelError(f"beta must be positive, got {self.beta}")
        if self.kappa < 0:
            raise ChannelModelError(f"kappa must be non-negative, got {self.kappa}")
        n = self.theta.shape[0]
        if self.theta.shape != (n, n) or self.los_dir.shape != (n,):
            raise ChannelModelError("theta must be N x N and los_dir length N")
        ev = np.linalg.eigvalsh(self.theta)
        if ev[0] < -PSD_EPS * max(ev[-1], 1.0):
            raise ChannelModelError(f"theta is not PSD: min eigenvalue {ev[0]:.3e}")
        if self.is_local:
            # kappa splits power between scattered and specular parts
            self.r_cov = (self.beta / (1.0 + self.kappa)) * self.theta
            self.h_bar = math.sqrt(self.beta * self.kappa / (1.0 + self.kappa)) * self.los_dir
        else:
            # inter-cell links are pure scattered fading
            self.r_cov = self.beta * self.theta
            self.h_bar = np.zeros(n, dtype=complex)

    @property
    def n_antennas(self) -> int:
        return self.theta.shape[0]

    @property
    def sqrt_r(self) -> np.ndarray:
        if self._sqrt_r is None:
            self._sqrt_r = _clamped_sqrt(self.r_cov)
        return self._sqrt_r


def build_profile(
    beta: float,
    kappa: float,
    theta: np.ndarray,
    los_dir: np.ndarray,
    is_local: bool = True,
) -> UserLinkProfile:
    return UserLinkProfile(beta=beta, kappa=kappa, theta=theta, los_dir=los_dir, is_local=is_local)


def standard_complex_normal(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """CN(0, 1) samples: unit variance split evenly between re/im parts."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def sample_channel(profile: UserLinkProfile, rng: np.random.Generator) -> np.ndarray:
    """One realization h = h_bar + R^{1/2} z, z ~ CN(0, I)."""
    z = standard_complex_normal(rng, profile.n_antennas)
    return profile.h_bar + profile.sqrt_r @ z


@dataclass
class ScenarioGeometry:
    """Cell layout and user drop used to derive link statistics."""

    cell_centers: np.ndarray  # (L, 2) meters
    cell_radius: float
    pathloss_exponent: float
    user_positions: np.ndarray  # (L, K, 2) meters

    def __post_init__(self):
        if self.cell_radius <= 0 or self.pathloss_exponent <= 0:
            raise ChannelModelError("cell_radius and pathloss_exponent must be positive")

    def distance(self, bs: int, cell: int, user: int) -> float:
        d = np.linalg.norm(self.user_positions[cell, user] - self.cell_centers[bs])
        if d <= 0:
            raise ChannelModelError("user-BS distance must be positive")
        return float(d)

    def arrival_angle(self, bs: int, cell: int, user: int) -> float:
        dx, dy = self.user_positions[cell, user] - self.cell_centers[bs]
        return math.atan2(dy, dx)


MIN_USER_DISTANCE_M = 1.0
CELL_EDGE_FRACTION = 0.95
CELL_EDGE_JITTER_RAD = math.radians(5.0)


def drop_users(
    cell_centers: np.ndarray,
    cell_radius: float,
    n_users: int,
    placement: str,
    rng: np.random.Generator,
    pathloss_exponent: float = 2.5,
) -> ScenarioGeometry:
    """Place users per cell.

    `uniform_disk`: uniform over the annulus [1 m, cell_radius] around each BS.
    `cell_edge`: users at 0.95*radius toward the layout centroid, with a +-5
    degree angular jitter, which maximizes inter-cell interference and keeps
    the arrival angles close.
    """
    if n_users < 1:
        raise ChannelModelError("need at least one user")
    cell_centers = np.atleast_2d(np.asarray(cell_centers, dtype=float))
    n_cells = cell_centers.shape[0]
    positions = np.zeros((n_cells, n_users, 2))
    centroid = cell_centers.mean(axis=0)
    for j in range(n_cells):
        if placement == "uniform_disk":
            lo, hi = MIN_USER_DISTANCE_M**2, cell_radius**2
            r = np.sqrt(rng.uniform(lo, hi, size=n_users))
            phi = rng.uniform(-np.pi, np.pi, size=n_users)
        elif placement == "cell_edge":
            to_centroid = centroid - cell_centers[j]
            if np.linalg.norm(to_centroid) < 1e-9:
                # single-cell layout has no meaningful centroid direction
                base = 0.0
            else:
                base = math.atan2(to_centroid[1], to_centroid[0])
            r = np.full(n_users, CELL_EDGE_FRACTION * cell_radius)
            phi = base + rng.uniform(-CELL_EDGE_JITTER_RAD, CELL_EDGE_JITTER_RAD, size=n_users)
        else:
            raise ChannelModelError(f"unknown placement {placement!r}")
        positions[j, :, 0] = cell_centers[j, 0] + r * np.cos(phi)
        positions[j, :, 1] = cell_centers[j, 1] + r * np.sin(phi)
    return ScenarioGeometry(
        cell_centers=cell_centers,
        cell_radius=cell_radius,
        pathloss_exponent=pathloss_exponent,
        user_positions=positions,
    )
