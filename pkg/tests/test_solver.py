import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isac_subspace import (CommChannel, InfeasibleError, IsacError, ReducedProblem, Scenario,
                           benchmark_solutions, build_steering, draw_rayleigh_channel, oracle_solve,
                           solve_closed_form, verify_candidate)
from isac_subspace.solver import closed_form_magnitudes, crb_min_covariance

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
fracs = st.floats(min_value=0.0, max_value=1.0)


def problem(seed, frac, P=100.0):
    scn = Scenario()
    ch = draw_rayleigh_channel(seed, scn.n_t, normalize=True)
    return scn, ch, frac * P * np.vdot(ch.h, ch.h).real


@settings(max_examples=60, deadline=None)
@given(seeds, fracs)
def test_closed_form_matches_bisection(seed, frac):
    scn, ch, Gamma = problem(seed, frac)
    sol = solve_closed_form(scn, ch, Gamma)
    ref = oracle_solve(ReducedProblem.from_basis(sol.basis, scn.P, Gamma))
    assert np.linalg.norm(sol.nu_abs - ref) <= 1e-6 * np.sqrt(scn.P)


@pytest.mark.parametrize("seed, frac", [(2024, 0.5), (7, 0.8), (11, 0.95)])
def test_closed_form_matches_grid(seed, frac):
    scn, ch, Gamma = problem(seed, frac)
    sol = solve_closed_form(scn, ch, Gamma)
    grid = oracle_solve(ReducedProblem.from_basis(sol.basis, scn.P, Gamma), method="grid")
    assert abs(sol.nu_abs[0] - grid[0]) <= 1e-3 * np.sqrt(scn.P)


@settings(max_examples=60, deadline=None)
@given(seeds, fracs)
def test_solution_is_feasible(seed, frac):
    scn, ch, Gamma = problem(seed, frac)
    sol = solve_closed_form(scn, ch, Gamma)
    rep = verify_candidate(sol.R, scn, ch, Gamma)
    assert rep.feasible
    assert rep.subspace_residual <= 1e-8
    assert abs(np.linalg.norm(sol.u) ** 2 - scn.P) <= 1e-9 * scn.P


@settings(max_examples=30, deadline=None)
@given(seeds, fracs)
def test_ao_equals_detmax(seed, frac):
    scn, ch, Gamma = problem(seed, frac)
    ao = solve_closed_form(scn, ch, Gamma, "AO").R
    dm = solve_closed_form(scn, ch, Gamma, "DetMax").R
    assert np.linalg.norm(ao - dm) <= 1e-12 * scn.P


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_nu1_nonincreasing_in_gamma(seed):
    scn, ch, gmax = problem(seed, 1.0)
    nu1 = [solve_closed_form(scn, ch, g).nu1_sq for g in np.linspace(0, gmax, 60)]
    assert np.all(np.diff(nu1) <= 1e-9)


def test_regime_labels():
    scn, ch, gmax = problem(2024, 1.0)
    sol = solve_closed_form(scn, ch, 0.0)
    assert sol.regime == "inactive"
    assert solve_closed_form(scn, ch, 0.97 * gmax).regime == "active"
    mrt = solve_closed_form(scn, ch, gmax)
    assert mrt.regime == "boundary"
    R_comm, _ = benchmark_solutions(scn, ch)
    np.testing.assert_allclose(mrt.R, R_comm, atol=1e-12 * scn.P)


def test_infeasible_threshold():
    scn, ch, gmax = problem(2024, 1.0)
    with pytest.raises(InfeasibleError) as info:
        solve_closed_form(scn, ch, 1.1 * gmax)
    assert info.value.gamma_max == pytest.approx(gmax)


def test_bad_criterion_and_shape():
    scn, ch, _ = problem(0, 0.5)
    with pytest.raises(IsacError):
        solve_closed_form(scn, ch, 1.0, criterion="trace")
    with pytest.raises(IsacError):
        solve_closed_form(scn, draw_rayleigh_channel(0, 8), 1.0)
    with pytest.raises(IsacError):
        solve_closed_form(scn, draw_rayleigh_channel(0, scn.n_t, n_u=2), 1.0)


def test_zero_c1_channel():
    # h orthogonal to a*: all of the SNR has to come from the other directions
    scn = Scenario()
    a, ad = build_steering(scn.theta, scn.n_t)
    rng = np.random.default_rng(5)
    h = rng.standard_normal(scn.n_t) + 1j * rng.standard_normal(scn.n_t)
    h = h - np.vdot(a.conj(), h) * a.conj()
    h /= np.linalg.norm(h)
    ch = CommChannel.from_vector(h)
    sol = solve_closed_form(scn, ch, 40.0)
    ref = oracle_solve(ReducedProblem.from_basis(sol.basis, scn.P, 40.0))
    np.testing.assert_allclose(sol.nu_abs, ref, atol=1e-6)
    assert verify_candidate(sol.R, scn, ch, 40.0).feasible


def test_corrupted_varsigma_is_detected():
    scn, ch, gmax = problem(2024, 1.0)
    sol = solve_closed_form(scn, ch, 0.9 * gmax)
    rp = ReducedProblem.from_basis(sol.basis, scn.P, 0.9 * gmax)
    wrong = (rp.c2 ** 2 + rp.c3 ** 2) / rp.c2
    mags, _, _ = closed_form_magnitudes(rp, varsigma=wrong)
    assert np.linalg.norm(mags - oracle_solve(rp)) > 1e-3 * np.sqrt(scn.P)


def test_crb_min_is_pencil_beam():
    scn = Scenario()
    R = crb_min_covariance(scn)
    a, _ = build_steering(scn.theta, scn.n_t)
    np.testing.assert_allclose(R, scn.P * np.outer(a.conj(), a), atol=1e-6 * scn.P)
    # cached result must not be aliased
    R[0, 0] = 0
    assert crb_min_covariance(scn)[0, 0] != 0


def test_verify_flags_power_violation():
    scn, ch, Gamma = problem(3, 0.5)
    sol = solve_closed_form(scn, ch, Gamma)
    assert not verify_candidate(1.1 * sol.R, scn, ch, Gamma).feasible
    assert not verify_candidate(sol.R, scn, ch, 2 * Gamma).feasible


def test_reduced_problem_validation():
    with pytest.raises(IsacError):
        ReducedProblem(-1.0, 0.0, 0.0, 1.0, 0.0)
    with pytest.raises(IsacError):
        ReducedProblem(0.1, 0.2, 0.3, 0.0, 0.0)


def test_other_scenarios():
    scn = dataclasses.replace(Scenario(), n_t=6, n_r=4, T=8)
    ch = draw_rayleigh_channel(1, 6)
    gmax = scn.P * np.vdot(ch.h, ch.h).real
    for frac in (0.1, 0.6, 0.99):
        sol = solve_closed_form(scn, ch, frac * gmax)
        assert verify_candidate(sol.R, scn, ch, frac * gmax).feasible
