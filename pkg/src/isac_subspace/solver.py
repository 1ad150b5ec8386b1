"""Rate-constrained rank-1 waveform design for one target and a single-antenna user.

The optimum lives in ``span{a*, a_dot*, h}``; in the orthonormal basis
``(a_u, a_d, a_h)`` it is ``u = sum_l |nu_l| exp(j zeta_l) a_l``.  Three regimes:

``inactive``  ``Gamma <= P c1^2``: all power on ``a*``, the rate constraint is slack.
``active``    ``P c1^2 < Gamma < Gamma_max``: magnitudes from the quadratic root.
``boundary``  ``Gamma == Gamma_max``: maximum ratio transmission ``u = sqrt(P) h/||h||``.

The angle-only and determinant criteria depend on ``|nu_1|`` alone (the former
as ``1/|nu_1|^2``, the latter as ``|nu_1|^6``), so both are solved by the same
magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .array_model import build_steering
from .channel_model import CommChannel, achievable_rate
from .closed_form import ZERO_GAIN, QuadCoeffs, active_magnitudes, quad_coeffs
from .config import Scenario
from .errors import InfeasibleError, IsacError, UnidentifiableError
from .fim import angle_crb_schur, crb_trace, fim_single
from .subspace import BOUNDARY_RTOL, OrthoBasis, isac_basis, ortho_basis

CRITERIA = ("AO", "DetMax")


@dataclass(frozen=True)
class ReducedProblem:
    c1: float
    c2: float
    c3: float
    P: float
    Gamma: float

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3) < 0 or self.P <= 0 or self.Gamma < 0:
            raise IsacError("gains and Gamma must be nonnegative and P positive")

    @classmethod
    def from_basis(cls, basis: OrthoBasis, P: float, Gamma: float) -> "ReducedProblem":
        return cls(basis.c1, basis.c2, basis.c3, P, Gamma)

    @property
    def gamma_max(self) -> float:
        return self.P * (self.c1 ** 2 + self.c2 ** 2 + self.c3 ** 2)

    def check_feasible(self):
        if self.Gamma > self.gamma_max * (1.0 + BOUNDARY_RTOL):
            raise InfeasibleError(self.Gamma, self.gamma_max)


@dataclass(frozen=True)
class ClosedFormSolution:
    nu_abs: np.ndarray
    zeta: np.ndarray
    u: np.ndarray
    R: np.ndarray
    regime: str
    coeffs: QuadCoeffs | None
    criterion: str
    Gamma: float
    basis: OrthoBasis

    @property
    def nu1_sq(self) -> float:
        return float(self.nu_abs[0] ** 2)


@dataclass(frozen=True)
class VerificationReport:
    feasible: bool
    snr_slack: float
    power_residual: float
    psd_residual: float
    crb_trace: float
    angle_crb: float
    rate: float
    subspace_residual: float


def single_user_basis(scn: Scenario, ch: CommChannel) -> OrthoBasis:
    scn.require_single_target()
    if ch.n_u != 1:
        raise IsacError("closed-form design needs a single-antenna user")
    if ch.n_t != scn.n_t:
        raise IsacError(f"channel has {ch.n_t} inputs, scenario has n_t={scn.n_t}")
    a, ad = build_steering(scn.theta, scn.n_t)
    return ortho_basis(ch.h, a, ad)


def closed_form_magnitudes(rp: ReducedProblem, varsigma: float | None = None):
    """Optimal ``(|nu_1|, |nu_2|, |nu_3|)``, regime name, and quadratic coefficients."""
    rp.check_feasible()
    c1, c2, c3, P, Gamma = rp.c1, rp.c2, rp.c3, rp.P, rp.Gamma
    hn = np.sqrt(c1 ** 2 + c2 ** 2 + c3 ** 2)
    coeffs = quad_coeffs(c1, c2, c3, P, Gamma, varsigma) if c1 > ZERO_GAIN * hn else None
    if Gamma >= rp.gamma_max * (1.0 - BOUNDARY_RTOL):
        return np.sqrt(P) * np.array([c1, c2, c3]) / hn, "boundary", coeffs
    if Gamma <= P * c1 ** 2:
        return np.array([np.sqrt(P), 0.0, 0.0]), "inactive", coeffs
    if coeffs is None:
        # no gain on a*: spend exactly what the user needs, rest on a*
        s = np.hypot(c2, c3)
        y = np.sqrt(Gamma) / s
        return np.array([np.sqrt(max(P - y ** 2, 0.0)), y * c2 / s, y * c3 / s]), "active", None
    return np.array(active_magnitudes(c1, c2, c3, P, Gamma, coeffs)), "active", coeffs


def solve_closed_form(scn: Scenario, ch: CommChannel, Gamma: float, criterion: str = "AO",
                      varsigma: float | None = None) -> ClosedFormSolution:
    """Closed-form optimal covariance for received-power threshold ``Gamma`` (mW)."""
    if criterion not in CRITERIA:
        raise IsacError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    basis = single_user_basis(scn, ch)
    rp = ReducedProblem.from_basis(basis, scn.P, Gamma)
    mags, regime, coeffs = closed_form_magnitudes(rp, varsigma)
    if regime == "boundary":
        h = ch.h
        u = np.sqrt(scn.P) * h / np.linalg.norm(h)
    else:
        u = basis.vector(mags)
    return ClosedFormSolution(nu_abs=mags, zeta=basis.zeta.copy(), u=u, R=np.outer(u, u.conj()),
                              regime=regime, coeffs=coeffs, criterion=criterion, Gamma=float(Gamma),
                              basis=basis)


def _bisection(rp: ReducedProblem) -> np.ndarray:
    c1, P = rp.c1, rp.P
    s = np.hypot(rp.c2, rp.c3)
    target = np.sqrt(rp.Gamma)
    root_p = np.sqrt(P)

    def snr_amp(x1):
        # best SNR amplitude with |nu_1| = x1: rest of the power aligned with (c2, c3)
        return c1 * x1 + s * np.sqrt(max(P - x1 * x1, 0.0))

    if snr_amp(root_p) >= target:
        x1 = root_p
    else:
        hn = np.hypot(c1, s)
        lo, hi = root_p * c1 / hn, root_p
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if snr_amp(mid) >= target:
                lo = mid
            else:
                hi = mid
        x1 = lo
    y = np.sqrt(max(P - x1 * x1, 0.0))
    if s == 0:
        return np.array([x1, 0.0, 0.0])
    return np.array([x1, y * rp.c2 / s, y * rp.c3 / s])


def _grid(rp: ReducedProblem, points: int = 2000) -> np.ndarray:
    phi = np.linspace(0.0, np.pi / 2, points)
    root_p = np.sqrt(rp.P)
    x1 = root_p * np.cos(phi)[:, None]
    x2 = root_p * np.sin(phi)[:, None] * np.cos(phi)[None, :]
    x3 = root_p * np.sin(phi)[:, None] * np.sin(phi)[None, :]
    snr = (rp.c1 * x1 + rp.c2 * x2 + rp.c3 * x3) ** 2
    ok = snr >= rp.Gamma * (1.0 - 1e-6)
    if not ok.any():
        raise InfeasibleError(rp.Gamma, rp.gamma_max)
    score = np.where(ok, np.broadcast_to(x1, ok.shape), -np.inf)
    i, j = np.unravel_index(np.argmax(score), score.shape)
    return np.array([x1[i, 0], x2[i, j], x3[i, j]])


def oracle_solve(rp: ReducedProblem, method: str = "bisection") -> np.ndarray:
    """Optimal magnitudes found without the quadratic formula.

    ``bisection`` searches for the largest ``|nu_1|`` whose leftover power,
    aligned with ``(c2, c3)``, still reaches ``sqrt(Gamma)``.  ``grid`` sweeps the
    power sphere exhaustively (2000 x 2000 angles) and is only meant for tests.
    """
    rp.check_feasible()
    if method == "bisection":
        return _bisection(rp)
    if method == "grid":
        return _grid(rp)
    raise IsacError(f"unknown oracle method {method!r}")


def _batched_crb_trace(scn: Scenario, U: np.ndarray) -> np.ndarray:
    """tr(F^-1) for many rank-1 waveforms ``u`` (rows of ``U``)."""
    a, ad = build_steering(scn.theta, scn.n_t)
    _, bd = build_steering(scn.theta, scn.n_r)
    g = scn.T / scn.sigma_s_sq
    alpha = scn.alpha
    au = U @ a  # a^T u
    du = U @ ad
    f11 = g * abs(alpha) ** 2 * (np.vdot(bd, bd).real * np.abs(au) ** 2 + np.abs(du) ** 2)
    f12 = g * np.conj(alpha) * au * du.conj()
    f22 = g * np.abs(au) ** 2
    F = np.zeros((U.shape[0], 3, 3))
    F[:, 0, 0] = f11
    F[:, 0, 1] = F[:, 1, 0] = f12.real
    F[:, 0, 2] = F[:, 2, 0] = -f12.imag
    F[:, 1, 1] = F[:, 2, 2] = f22
    F *= 2.0
    w = np.linalg.eigvalsh(F)
    bad = w[:, 0] <= w[:, -1] / 1e12
    out = np.sum(1.0 / np.where(bad[:, None], 1.0, w), axis=1)
    out[bad] = np.inf
    return out


def crb_min_covariance(scn: Scenario, grid_points: int = 720) -> np.ndarray:
    """CRB-trace minimizer over ``u = sqrt(P)(cos psi a_u + sin psi e^{j phi} a_d)``.

    Without a rate constraint the optimum lies in ``span{a*, a_dot*}``, so this
    two-angle family is exhaustive up to a common phase.  Dense grid, then a
    bounded scalar refinement of ``psi`` at the best ``phi``.
    """
    return _crb_min_cached(scn, grid_points).copy()


@lru_cache(maxsize=16)
def _crb_min_cached(scn: Scenario, grid_points: int) -> np.ndarray:
    scn.require_single_target()
    a, ad = build_steering(scn.theta, scn.n_t)
    a_u = a.conj()
    a_d = ad.conj() / np.linalg.norm(ad)
    psi = np.linspace(0.0, np.pi / 2, grid_points)
    phi = np.arange(grid_points) * (2 * np.pi / grid_points)
    P, Ph = np.meshgrid(psi, phi, indexing="ij")
    coef_u = np.sqrt(scn.P) * np.cos(P).ravel()
    coef_d = np.sqrt(scn.P) * (np.sin(P) * np.exp(1j * Ph)).ravel()
    U = coef_u[:, None] * a_u[None, :] + coef_d[:, None] * a_d[None, :]
    vals = _batched_crb_trace(scn, U)
    best = int(np.argmin(vals))
    psi0, phi0 = P.ravel()[best], Ph.ravel()[best]

    def vec(ps):
        return np.sqrt(scn.P) * (np.cos(ps) * a_u + np.sin(ps) * np.exp(1j * phi0) * a_d)

    step = psi[1] - psi[0]
    lo, hi = max(0.0, psi0 - step), min(np.pi / 2, psi0 + step)
    res = optimize.minimize_scalar(lambda ps: _batched_crb_trace(scn, vec(ps)[None, :])[0],
                                   bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    u = vec(res.x) if res.fun < vals[best] else vec(psi0)
    return np.outer(u, u.conj())


def benchmark_solutions(scn: Scenario, ch: CommChannel) -> tuple[np.ndarray, np.ndarray]:
    """Communication-only (MRT) and sensing-only (CRB-trace minimizing) covariances."""
    scn.require_single_target()
    h = ch.h
    R_comm = scn.P * np.outer(h, h.conj()) / np.vdot(h, h).real
    return R_comm, crb_min_covariance(scn)


def verify_candidate(R, scn: Scenario, ch: CommChannel, Gamma: float, tol: float = 1e-9) -> VerificationReport:
    R = np.asarray(R, dtype=complex)
    Rh = 0.5 * (R + R.conj().T)
    scale = max(scn.P, 1.0)
    psd_res = max(0.0, -float(np.linalg.eigvalsh(Rh).min()))
    power_res = float(np.trace(Rh).real - scn.P)
    snr_slack = float(np.trace(ch.Q_c @ Rh).real - Gamma)
    try:
        F = fim_single(scn, Rh)
        crb = crb_trace(F)
        acrb = angle_crb_schur(F)
    except UnidentifiableError:
        crb = acrb = np.inf
    if psd_res <= tol * scale:
        rate = achievable_rate(Rh, ch)
    else:
        rate = float("nan")
    sub = isac_basis(scn.steering_set(), ch)
    Pp = np.eye(scn.n_t) - sub.P_U
    sub_res = float(np.linalg.norm(Pp @ Rh @ Pp))
    feasible = (psd_res <= tol * scale and abs(power_res) <= tol * scale
                and snr_slack >= -tol * max(Gamma, 1.0))
    return VerificationReport(feasible=bool(feasible), snr_slack=snr_slack, power_residual=power_res,
                              psd_residual=psd_res, crb_trace=crb, angle_crb=acrb, rate=rate,
                              subspace_residual=sub_res)
