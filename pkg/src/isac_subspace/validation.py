"""Oracle comparisons and invariant checks, run by ``isac-subspace validate``.

Each check returns a :class:`Check` with the worst measured residual and its
tolerance.  Output lines carry no timings, so a fixed seed gives a
byte-identical report.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .array_model import build_steering, build_steering_set
from .channel_model import CommChannel, achievable_rate, draw_rayleigh_channel, snr_threshold
from .config import Scenario, SweepSpec
from .experiments import beam_covariances, max_rate, pareto_point
from .fim import (NoiseModel, angle_crb_closed, angle_crb_schur, fim_det_closed, fim_fd_oracle,
                  fim_multi, fim_single)
from .sdp import build_sdp, candidate_point, parse_sdpa
from .solver import (ReducedProblem, benchmark_solutions, oracle_solve, single_user_basis,
                     solve_closed_form, verify_candidate)
from .subspace import corr_coeff, isac_basis, ortho_basis

NUM_CHANNELS = 10
NUM_GAMMA = 20


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} measured={self.value:.6e} tol={self.tol:.1e}"


def _le(name, value, tol):
    return Check(name, float(value), float(tol), bool(value <= tol))


def _ge(name, value, tol):
    return Check(name, float(value), float(tol), bool(value >= tol))


def _rel(x, y):
    x, y = np.asarray(x), np.asarray(y)
    den = max(np.linalg.norm(y), 1e-300)
    return float(np.linalg.norm(x - y) / den)


def _channels(scn: Scenario, n: int = NUM_CHANNELS, normalize: bool = True):
    return [draw_rayleigh_channel(scn.seed + i, scn.n_t, normalize, scn.sigma_c_sq) for i in range(n)]


def _gamma_grid(scn, ch, points=NUM_GAMMA):
    return SweepSpec(gamma_points=points).gamma_grid(max_rate(scn, ch))


def _random_psd(rng, n, trace):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    R = G @ G.conj().T
    return R * trace / np.trace(R).real


def _random_targets(rng, k):
    while True:
        ang = np.sort(rng.uniform(-np.pi / 3, np.pi / 3, k))
        if k == 1 or np.min(np.diff(ang)) > np.deg2rad(5):
            return ang


# --- acceptance criteria -------------------------------------------------------------


def check_closed_vs_oracle(scn: Scenario, varsigma_fn=None) -> list[Check]:
    """Closed form against the bisection oracle on 20 rates x 10 channels."""
    worst_nu = worst_crb = 0.0
    for ch in _channels(scn):
        basis = single_user_basis(scn, ch)
        for gamma in _gamma_grid(scn, ch):
            Gamma = snr_threshold(float(gamma), scn.sigma_c_sq).Gamma
            vs = varsigma_fn(basis) if varsigma_fn else None
            sol = solve_closed_form(scn, ch, Gamma, varsigma=vs)
            mags = oracle_solve(ReducedProblem.from_basis(basis, scn.P, Gamma))
            worst_nu = max(worst_nu, _rel(sol.nu_abs, mags))
            if varsigma_fn is None:
                closed, oracle = pareto_point(scn, ch, float(gamma))
                worst_crb = max(worst_crb, abs(closed["root_crb_deg"] / oracle["root_crb_deg"] - 1.0))
    if varsigma_fn is not None:
        return [_le("closed_vs_oracle_nu_rel", worst_nu, 1e-4)]
    return [_le("closed_vs_oracle_nu_rel", worst_nu, 1e-4),
            _le("closed_vs_oracle_root_crb_rel", worst_crb, 1e-2)]


def check_ao_detmax(scn: Scenario) -> Check:
    worst = 0.0
    for ch in _channels(scn):
        for gamma in _gamma_grid(scn, ch):
            Gamma = snr_threshold(float(gamma), scn.sigma_c_sq).Gamma
            a = solve_closed_form(scn, ch, Gamma, "AO").R
            d = solve_closed_form(scn, ch, Gamma, "DetMax").R
            worst = max(worst, np.linalg.norm(a - d) / scn.P)
    return _le("ao_detmax_frobenius_over_P", worst, 1e-12)


def check_monotone_tradeoff(scn: Scenario) -> Check:
    violations = 0
    for ch in _channels(scn):
        rows = [pareto_point(scn, ch, float(g)) for g in _gamma_grid(scn, ch)]
        for m in (0, 1):
            vals = [r[m]["root_crb_deg"] for r in rows]
            violations += int(np.sum(np.diff(vals) < 0))
    return _le("root_crb_monotone_violations", violations, 0)


def check_subspace_invariance(scn: Scenario, seed: int, instances: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_fim = worst_rate = worst_trace = 0.0
    for i in range(instances):
        k = 1 + i % 3
        n_u = 1 + (i // 3) % 2
        ss = build_steering_set(_random_targets(rng, k), scn.n_t, scn.n_r)
        ch = draw_rayleigh_channel(int(rng.integers(2 ** 32)), scn.n_t, False, scn.sigma_c_sq, n_u=n_u)
        alpha = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        R = _random_psd(rng, scn.n_t, scn.P)
        Rp = isac_basis(ss, ch).project(R)
        noise = NoiseModel.white(scn.sigma_s_sq, scn.n_r)
        worst_fim = max(worst_fim, _rel(fim_multi(ss, alpha, Rp, noise, scn.T).F,
                                        fim_multi(ss, alpha, R, noise, scn.T).F))
        r0 = achievable_rate(R, ch)
        worst_rate = max(worst_rate, abs(achievable_rate(Rp, ch) - r0) / r0)
        worst_trace = max(worst_trace, (np.trace(Rp).real - np.trace(R).real) / scn.P)

    worst_res = 0.0
    for ch in _channels(scn):
        sub = isac_basis(scn.steering_set(), ch)
        basis = single_user_basis(scn, ch)
        for gamma in _gamma_grid(scn, ch):
            Gamma = snr_threshold(float(gamma), scn.sigma_c_sq).Gamma
            u_cf = solve_closed_form(scn, ch, Gamma).u
            u_or = basis.vector(oracle_solve(ReducedProblem.from_basis(basis, scn.P, Gamma)))
            worst_res = max(worst_res, sub.residual(u_cf), sub.residual(u_or))
        R_comm, R_crb = benchmark_solutions(scn, ch)
        for Rb in (R_comm, R_crb):
            w, v = np.linalg.eigh(Rb)
            worst_res = max(worst_res, sub.residual(v[:, -1]))
    return [_le("subspace_fim_invariance_rel", worst_fim, 1e-9),
            _le("subspace_rate_invariance_rel", worst_rate, 1e-9),
            _le("subspace_trace_increase_over_P", max(worst_trace, 0.0), 1e-12),
            _le("optimizer_subspace_residual", worst_res, 1e-8)]


def check_fim(scn: Scenario, seed: int, instances: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed + 1)
    worst_fd = worst_red = 0.0
    for i in range(instances):
        k = 1 + i % 3
        ss = build_steering_set(_random_targets(rng, k), scn.n_t, scn.n_r)
        alpha = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        R = _random_psd(rng, scn.n_t, scn.P)
        noise = NoiseModel.white(scn.sigma_s_sq, scn.n_r)
        worst_fd = max(worst_fd, _rel(fim_fd_oracle(ss, alpha, R, noise, scn.T).F,
                                      fim_multi(ss, alpha, R, noise, scn.T).F))
        single = Scenario(n_t=scn.n_t, n_r=scn.n_r, targets=((ss.angles[0], alpha[0]),), T=scn.T, P=scn.P,
                          sigma_s_sq=scn.sigma_s_sq, sigma_c_sq=scn.sigma_c_sq)
        Fm = fim_multi(single.steering_set(), single.alphas, R, noise, scn.T).F
        Fs = fim_single(single, R).F
        worst_red = max(worst_red, np.abs(Fm - Fs).max() / np.abs(Fm).max())

    worst_det = worst_crb = 0.0
    ch_rng = np.random.default_rng(seed + 2)
    a, ad = build_steering(scn.theta, scn.n_t)
    for _ in range(instances):
        h = ch_rng.standard_normal(scn.n_t) + 1j * ch_rng.standard_normal(scn.n_t)
        basis = ortho_basis(h, a, ad)
        nu = ch_rng.standard_normal(3) + 1j * ch_rng.standard_normal(3)
        nu *= np.sqrt(scn.P) / np.linalg.norm(nu)
        u = basis.matrix @ nu
        F = fim_single(scn, np.outer(u, u.conj()))
        direct = np.linalg.det(F.F)
        worst_det = max(worst_det, abs(fim_det_closed(abs(nu[0]), scn) / direct - 1.0))
        worst_crb = max(worst_crb, abs(angle_crb_closed(abs(nu[0]) ** 2, scn) / angle_crb_schur(F) - 1.0),
                        abs(angle_crb_schur(F) / np.linalg.inv(F.F)[0, 0] - 1.0))
    return [_le("fim_vs_fd_oracle_rel", worst_fd, 1e-3),
            _le("fim_single_vs_multi", worst_red, 1e-10),
            _le("det_closed_vs_direct_rel", worst_det, 1e-9),
            _le("angle_crb_closed_vs_schur_vs_inverse_rel", worst_crb, 1e-9)]


def check_correlation(scn: Scenario, channels: int = 5) -> list[Check]:
    worst = 0.0
    for ch in _channels(scn, channels):
        basis = single_user_basis(scn, ch)
        gmax = basis.gamma_max(scn.P)
        r = corr_coeff(basis, scn.P, 0.4 * gmax, 0.95 * gmax)
        worst = max(worst, abs(r.G_analytic - r.G_quadrature) / r.G_analytic)
    a, ad = build_steering(scn.theta, scn.n_t)
    aligned = ortho_basis(0.7 * np.exp(0.3j) * a.conj(), a, ad)
    gmax = aligned.gamma_max(scn.P)
    g1, g2 = 0.4 * gmax, 0.95 * gmax
    r = corr_coeff(aligned, scn.P, g1, g2)
    want = scn.P * (g2 - g1)
    err = max(abs(r.G_analytic - want), abs(r.G_quadrature - want)) / want
    return [_le("G_analytic_vs_quadrature_rel", worst, 1e-6), _le("G_aligned_channel_rel", err, 1e-10)]


def check_beampattern_order(scn: Scenario) -> Check:
    good = 0
    chans = _channels(scn)
    for ch in chans:
        covs = beam_covariances(scn, ch, 0.5 * max_rate(scn, ch))
        a, _ = build_steering(scn.theta, scn.n_t)
        p = {k: float((a @ getattr(covs, k) @ a.conj()).real) for k in ("commopt", "ao", "crbmin")}
        tol = 1e-9 * scn.P
        if p["commopt"] <= p["ao"] + tol and p["ao"] <= p["crbmin"] + tol:
            good += 1
    return _ge("beampattern_order_channels", good, 8)


def check_correlation_link(scn: Scenario, channels: int = 5, points: int = 20) -> Check:
    spec = SweepSpec(gamma_points=points)
    G, crb = [], []
    for ch in _channels(scn, channels):
        basis = single_user_basis(scn, ch)
        gmax = basis.gamma_max(scn.P)
        G.append(corr_coeff(basis, scn.P, 0.4 * gmax, 0.95 * gmax).G)
        curve = []
        for gamma in spec.gamma_grid(max_rate(scn, ch)):
            sol = solve_closed_form(scn, ch, snr_threshold(float(gamma), scn.sigma_c_sq).Gamma)
            curve.append(np.sqrt(angle_crb_closed(sol.nu1_sq, scn)))
        crb.append(np.array(curve))
    worst = 1.0
    for i, j in combinations(range(channels), 2):
        if G[i] == G[j]:
            continue
        hi, lo = (i, j) if G[i] > G[j] else (j, i)
        frac = float(np.mean(crb[hi] <= crb[lo] * (1 + 1e-12)))
        worst = min(worst, frac)
    return _ge("G_rank_vs_root_crb_fraction", worst, 0.8)


# --- supporting invariants -----------------------------------------------------------


def check_steering(scn: Scenario) -> Check:
    worst = 0.0
    for n in (2, 3, scn.n_t, scn.n_r, 31):
        for th in np.deg2rad(np.linspace(-89, 89, 37)):
            a, ad = build_steering(th, n)
            ident = np.pi ** 2 * np.cos(th) ** 2 * (n ** 2 - 1) / 12
            worst = max(worst, abs(np.linalg.norm(a) - 1), abs(np.vdot(a, ad)),
                        abs(np.vdot(ad, ad).real / ident - 1) if ident > 0 else 0.0)
    return _le("steering_norm_orthogonality_identity", worst, 1e-9)


def check_solver_feasibility(scn: Scenario) -> Check:
    worst = 0.0
    for ch in _channels(scn):
        for gamma in _gamma_grid(scn, ch):
            Gamma = snr_threshold(float(gamma), scn.sigma_c_sq).Gamma
            rep = verify_candidate(solve_closed_form(scn, ch, Gamma).R, scn, ch, Gamma)
            worst = max(worst, abs(rep.power_residual), max(-rep.snr_slack, 0.0), rep.psd_residual,
                        0.0 if rep.feasible else np.inf)
    return _le("solver_feasibility_residual", worst, 1e-9)


def check_varsigma_mutation(scn: Scenario) -> Check:
    """A wrong constant (denominator |h^H a_d|) must be caught by the oracle comparison."""

    def printed(basis):
        return (basis.c2 ** 2 + basis.c3 ** 2) / basis.c2

    mutated = check_closed_vs_oracle(scn, printed)[0]
    return Check("mutation_varsigma_detected", mutated.value, mutated.tol, not mutated.passed)


def check_sdp(scn: Scenario) -> list[Check]:
    ch = draw_rayleigh_channel(scn.seed, scn.n_t, True, scn.sigma_c_sq)
    Gamma = 0.6 * ch.gamma_max(scn.P)
    problem = build_sdp(scn, ch, Gamma)
    text = problem.to_text()
    again = parse_sdpa(text)
    same = again.body() == problem.body()
    sol = solve_closed_form(scn, ch, Gamma)
    F = fim_single(scn, sol.R).F
    x = candidate_point(again, sol.R, F)
    worst = 0.0
    for M in again.block_matrices(x):
        worst = max(worst, -np.linalg.eigvalsh(M).min() / max(np.abs(M).max(), 1.0))
    return [Check("sdp_roundtrip_body_identical", 0.0 if same else 1.0, 0.0, same),
            _le("sdp_closed_form_constraint_violation", max(worst, 0.0), 1e-9)]


def run_checks(scn: Scenario | None = None, seed: int | None = None) -> list[Check]:
    scn = scn or Scenario()
    seed = scn.seed if seed is None else seed
    checks = [check_steering(scn)]
    checks += check_fim(scn, seed)
    checks += check_subspace_invariance(scn, seed)
    checks += check_closed_vs_oracle(scn)
    checks.append(check_ao_detmax(scn))
    checks.append(check_monotone_tradeoff(scn))
    checks.append(check_solver_feasibility(scn))
    checks += check_correlation(scn)
    checks.append(check_beampattern_order(scn))
    checks.append(check_correlation_link(scn))
    checks.append(check_varsigma_mutation(scn))
    checks += check_sdp(scn)
    return checks


def validate_suite(scn: Scenario | None = None, seed: int | None = None) -> tuple[bool, str]:
    """Run every check; return overall status and the report text (one line per check)."""
    checks = run_checks(scn, seed)
    ok = all(c.passed for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"{'PASS' if ok else 'FAIL'} summary checks={len(checks)} "
                 f"failed={sum(not c.passed for c in checks)}")
    return ok, "\n".join(lines) + "\n"
