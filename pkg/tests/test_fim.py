import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isac_subspace import (NoiseModel, Scenario, UnidentifiableError, angle_crb_closed, angle_crb_schur,
                           build_steering, build_steering_set, crb_trace, fim_det_closed, fim_fd_oracle,
                           fim_multi, fim_single)
from isac_subspace.fim import psd_sqrt, synthesize_waveform

from conftest import random_psd

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def rank1(scn, nu):
    """Covariance of ``u = nu1 a* + nu2 a_dot*/||a_dot||``."""
    a, ad = build_steering(scn.theta, scn.n_t)
    u = nu[0] * a.conj() + nu[1] * ad.conj() / np.linalg.norm(ad)
    return np.outer(u, u.conj())


def test_angle_crb_frozen_value():
    # T=30, |nu1|^2=100, sigma_s^2=1, |alpha|=1, theta=15 deg, N_r=12
    crb = angle_crb_closed(100.0, Scenario())
    assert crb == pytest.approx(1.5188212214338399e-06, rel=1e-12)
    assert np.rad2deg(np.sqrt(crb)) == pytest.approx(0.07061158509944103, rel=1e-12)


def test_closed_angle_crb_matches_schur():
    scn = Scenario()
    for nu in ([10.0, 0.0], [7.0, 5.0], [3.0, 9.0]):
        R = rank1(scn, nu)
        assert angle_crb_schur(fim_single(scn, R)) == pytest.approx(angle_crb_closed(nu[0] ** 2, scn), rel=1e-10)


@pytest.mark.parametrize("nu", [[10.0, 0.0], [6.0, 8.0], [1.0, 9.9]])
def test_determinant_constant(nu):
    scn = Scenario()
    F = fim_single(scn, rank1(scn, nu)).F
    assert np.linalg.det(F) == pytest.approx(fim_det_closed(nu[0], scn), rel=1e-9)


def test_determinant_noise_power_scaling():
    base = Scenario()
    scn = dataclasses.replace(base, sigma_s_sq=2.0)
    F = fim_single(scn, rank1(scn, [10.0, 0.0])).F
    # sigma^-6: halving every FIM entry scales the 3x3 determinant by 1/8
    assert np.linalg.det(F) == pytest.approx(fim_det_closed(10.0, base) / 8, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_single_equals_multi(seed):
    rng = np.random.default_rng(seed)
    scn = Scenario()
    R = random_psd(rng, scn.n_t, scn.P)
    Fs = fim_single(scn, R).F
    Fm = fim_multi(scn.steering_set(), scn.alphas, R, NoiseModel.white(scn.sigma_s_sq, scn.n_r), scn.T).F
    assert np.linalg.norm(Fs - Fm) <= 1e-10 * np.linalg.norm(Fm)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_multi_matches_finite_differences(k):
    rng = np.random.default_rng(k)
    thetas = np.deg2rad([-40.0, 5.0, 35.0][:k])
    alphas = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    ss = build_steering_set(thetas, 6, 8)
    R = random_psd(rng, 6, 10.0)
    noise = NoiseModel.white(1.0, 8)
    F = fim_multi(ss, alphas, R, noise, 12).F
    Ffd = fim_fd_oracle(ss, alphas, R, noise, 12).F
    assert np.linalg.norm(F - Ffd) <= 1e-6 * np.linalg.norm(F)


def test_colored_noise_finite_differences():
    rng = np.random.default_rng(7)
    ss = build_steering_set(np.deg2rad([10.0, -25.0]), 5, 6)
    alphas = np.array([1.0 + 0.5j, -0.3 + 0.8j])
    G = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    noise = NoiseModel(G @ G.conj().T + np.eye(6))
    R = random_psd(rng, 5, 4.0)
    F = fim_multi(ss, alphas, R, noise, 10).F
    Ffd = fim_fd_oracle(ss, alphas, R, noise, 10).F
    assert np.linalg.norm(F - Ffd) <= 1e-6 * np.linalg.norm(F)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_fim_symmetric_psd(seed):
    rng = np.random.default_rng(seed)
    ss = build_steering_set(np.deg2rad([-20.0, 30.0]), 6, 6)
    F = fim_multi(ss, [1.0, 0.5j], random_psd(rng, 6, 5.0), NoiseModel.white(1.0, 6), 10).F
    np.testing.assert_allclose(F, F.T, atol=1e-12 * np.abs(F).max())
    assert np.linalg.eigvalsh(F).min() >= -1e-9 * np.abs(F).max()


def test_waveform_reproduces_covariance():
    rng = np.random.default_rng(3)
    R = random_psd(rng, 6, 10.0, rank=3)
    X = synthesize_waveform(R, 20)
    np.testing.assert_allclose(X @ X.conj().T / 20, R, atol=1e-10)
    S = psd_sqrt(R)
    np.testing.assert_allclose(S @ S, R, atol=1e-10)


def test_singular_fim_names_direction():
    scn = Scenario()
    # all power on a_dot*: a^T u = 0 so alpha is unidentifiable
    R = rank1(scn, [0.0, 10.0])
    with pytest.raises(UnidentifiableError) as info:
        crb_trace(fim_single(scn, R))
    assert info.value.direction in ("re_alpha_1", "im_alpha_1")


def test_zero_power_on_a_rejected():
    with pytest.raises(UnidentifiableError):
        angle_crb_closed(0.0, Scenario())
