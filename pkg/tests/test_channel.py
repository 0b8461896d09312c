import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import j0

from rician_mimo.channel import (
    ChannelModelError,
    build_profile,
    dft_steering,
    drop_users,
    exponential_correlation,
    los_steering,
    one_ring_correlation,
    pathloss,
    sample_channel,
)


# ---------------------------------------------------------------------------
# one-ring correlation


def test_one_ring_unit_diagonal():
    theta = one_ring_correlation(-math.pi, -0.3, 4)
    assert np.allclose(np.diag(theta), 1.0)


def test_one_ring_hermitian():
    theta = one_ring_correlation(-1.0, 2.0, 6)
    assert np.max(np.abs(theta - theta.conj().T)) < 1e-12


def test_one_ring_against_quadrature_oracle():
    # independent adaptive quadrature of the defining integral
    lo, hi = -math.pi, 0.0
    theta = one_ring_correlation(lo, hi, 2)

    def integrand_re(t):
        return math.cos(math.pi * math.cos(t)) / (hi - lo)

    def integrand_im(t):
        return math.sin(math.pi * math.cos(t)) / (hi - lo)

    re, _ = quad(integrand_re, lo, hi, epsabs=1e-12)
    im, _ = quad(integrand_im, lo, hi, epsabs=1e-12)
    # entry (1, 2) integrates exp(+j*pi*cos(theta)) (v - u = 1)
    assert theta[0, 1].real == pytest.approx(re, abs=1e-10)
    assert theta[0, 1].imag == pytest.approx(im, abs=1e-10)
    # real part is the order-0 Bessel value by the cosine-kernel identity
    assert theta[0, 1].real == pytest.approx(j0(math.pi), abs=1e-10)


def test_one_ring_degenerate_window_rejected():
    with pytest.raises(ChannelModelError):
        one_ring_correlation(0.5, 0.5, 4)


@settings(max_examples=25, deadline=None)
@given(
    lo=st.floats(-math.pi, math.pi - 0.05),
    width=st.floats(0.05, 2 * math.pi),
    n=st.integers(1, 24),
)
def test_one_ring_psd_property(lo, width, n):
    theta = one_ring_correlation(lo, lo + width, n)
    assert np.max(np.abs(theta - theta.conj().T)) < 1e-12
    ev = np.linalg.eigvalsh(theta)
    assert ev[0] > -1e-10
    # bounded spectral norm: at most n for a unit-diagonal PSD matrix
    assert ev[-1] <= n + 1e-8


# ---------------------------------------------------------------------------
# exponential correlation


def test_exponential_rho_zero_is_identity():
    assert np.array_equal(exponential_correlation(0.0, 5), np.eye(5))


def test_exponential_first_row():
    theta = exponential_correlation(0.5, 3)
    assert np.allclose(theta[0], [1.0, 0.5, 0.25])


def test_exponential_psd_at_high_rho():
    ev = np.linalg.eigvalsh(exponential_correlation(0.9, 8))
    assert ev[0] > 0


def test_exponential_complex_rho_hermitian():
    theta = exponential_correlation(0.4 + 0.3j, 6)
    assert np.max(np.abs(theta - theta.conj().T)) < 1e-12
    assert np.allclose(np.diag(theta), 1.0)


def test_exponential_rejects_unit_rho():
    with pytest.raises(ChannelModelError):
        exponential_correlation(1.0, 4)


# ---------------------------------------------------------------------------
# steering vectors and pathloss


def test_steering_broadside_all_ones():
    assert np.allclose(los_steering(0.0, 5), np.ones(5))


def test_steering_endfire_alternates():
    assert np.allclose(los_steering(math.pi / 2, 4), [1, -1, 1, -1])


def test_steering_norm():
    z = los_steering(0.7, 33)
    assert np.linalg.norm(z) ** 2 == pytest.approx(33, abs=1e-12)


def test_dft_steering_orthogonal():
    n = 16
    cols = np.column_stack([dft_steering(i, n) for i in range(4)])
    gram = cols.conj().T @ cols
    assert np.allclose(gram, n * np.eye(4), atol=1e-10)


def test_pathloss_values():
    assert pathloss(1.0, 2.5) == pytest.approx(1.0)
    assert pathloss(10.0, 2.5) == pytest.approx(10 ** (-2.5))
    assert pathloss(150.0, 2.5) == pytest.approx(150 ** (-2.5))


def test_pathloss_rejects_nonpositive():
    with pytest.raises(ChannelModelError):
        pathloss(0.0, 2.5)


# ---------------------------------------------------------------------------
# profiles


def test_profile_rayleigh_has_zero_mean():
    p = build_profile(2.0, 0.0, np.eye(4, dtype=complex), los_steering(0.3, 4))
    assert np.allclose(p.h_bar, 0.0)
    assert np.allclose(p.r_cov, 2.0 * np.eye(4))


def test_profile_large_kappa_limit():
    n = 4
    p = build_profile(2.0, 1e12, np.eye(n, dtype=complex), los_steering(0.3, n))
    assert np.linalg.norm(p.r_cov, 2) <= 2.0 * 1e-11
    assert np.linalg.norm(p.h_bar) ** 2 == pytest.approx(n * 2.0, rel=1e-9)


def test_profile_unit_kappa_split():
    n = 6
    p = build_profile(2.0, 1.0, np.eye(n, dtype=complex), los_steering(0.1, n))
    assert np.allclose(p.r_cov, np.eye(n))
    assert np.linalg.norm(p.h_bar) ** 2 == pytest.approx(n)


@settings(max_examples=20, deadline=None)
@given(beta=st.floats(0.01, 10.0), kappa=st.floats(0.0, 50.0))
def test_profile_power_identity(beta, kappa):
    # scattered + specular powers always add up to beta per antenna
    n = 5
    p = build_profile(beta, kappa, np.eye(n, dtype=complex), los_steering(0.2, n))
    total = np.real(np.trace(p.r_cov)) / n + np.linalg.norm(p.h_bar) ** 2 / n
    assert total == pytest.approx(beta, rel=1e-12)


def test_intercell_profile_has_no_los():
    p = build_profile(0.5, 3.0, np.eye(4, dtype=complex), los_steering(0.3, 4), is_local=False)
    assert np.allclose(p.h_bar, 0.0)
    assert np.allclose(p.r_cov, 0.5 * np.eye(4))  # kappa only weights local links


def test_profile_rejects_indefinite_theta():
    bad = np.diag([1.0, -0.5]).astype(complex)
    with pytest.raises(ChannelModelError):
        build_profile(1.0, 1.0, bad, los_steering(0.0, 2))


# ---------------------------------------------------------------------------
# sampling


def test_sample_channel_zero_covariance_returns_mean():
    n = 4
    p = build_profile(1.0, 1e12, np.eye(n, dtype=complex), los_steering(0.5, n))
    rng = np.random.default_rng(0)
    draw = sample_channel(p, rng)
    assert np.allclose(draw, p.h_bar, atol=1e-5)


def test_sample_channel_moments():
    n = 6
    theta = one_ring_correlation(-math.pi, -1.0, n)
    p = build_profile(1.5, 0.8, theta, los_steering(0.4, n))
    rng = np.random.default_rng(123)
    draws = 100_000
    z = (rng.standard_normal((draws, n)) + 1j * rng.standard_normal((draws, n))) / math.sqrt(2)
    h = p.h_bar[None, :] + z @ p.sqrt_r.T
    mean = h.mean(axis=0)
    # per-entry std of the mean estimate
    sigma = np.sqrt(np.real(np.diag(p.r_cov)) / draws)
    assert np.all(np.abs(mean - p.h_bar) < 5 * sigma)
    centered = h - p.h_bar[None, :]
    emp_cov = centered.conj().T @ centered / draws
    assert np.linalg.norm(emp_cov.T - p.r_cov) < 5 * np.linalg.norm(p.r_cov) / math.sqrt(draws) * n


def test_sample_channel_seeded_determinism():
    n = 5
    p = build_profile(1.0, 1.0, np.eye(n, dtype=complex), los_steering(0.2, n))
    a = sample_channel(p, np.random.default_rng(42))
    b = sample_channel(p, np.random.default_rng(42))
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# user drops


def test_drop_users_uniform_within_annulus():
    geo = drop_users(np.zeros((1, 2)), 150.0, 50, "uniform_disk", np.random.default_rng(1))
    d = np.linalg.norm(geo.user_positions[0], axis=1)
    assert np.all(d >= 1.0 - 1e-9)
    assert np.all(d <= 150.0 + 1e-9)


def test_drop_users_reproducible():
    a = drop_users(np.zeros((1, 2)), 150.0, 1, "uniform_disk", np.random.default_rng(7))
    b = drop_users(np.zeros((1, 2)), 150.0, 1, "uniform_disk", np.random.default_rng(7))
    assert np.array_equal(a.user_positions, b.user_positions)


def test_drop_users_cell_edge_distance():
    centers = np.array([[0.0, 0.0], [300.0, 0.0], [150.0, 260.0]])
    geo = drop_users(centers, 150.0, 10, "cell_edge", np.random.default_rng(3))
    for j in range(3):
        d = np.linalg.norm(geo.user_positions[j] - centers[j], axis=1)
        assert np.all(np.abs(d - 0.95 * 150.0) < 0.1 * 150.0)


def test_drop_users_unknown_placement():
    with pytest.raises(ChannelModelError):
        drop_users(np.zeros((1, 2)), 150.0, 3, "grid", np.random.default_rng(0))
