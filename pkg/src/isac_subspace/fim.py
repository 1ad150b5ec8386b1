"""Fisher information for the MIMO echo model ``Y = B diag(alpha) A^T X + Z``.

Unknowns are ordered ``[theta_1..K, Re alpha_1..K, Im alpha_1..K]``.  The real
3K x 3K FIM is built from three complex K x K blocks::

    F = 2 [[ Re F11,    Re F12,   -Im F12 ],
           [ Re F12^T,  Re F22,   -Im F22 ],
           [-Im F12^T, -Im F22^T,  Re F22 ]]

``fim_fd_oracle`` recomputes the same matrix from scratch by differentiating
the noiseless echo numerically, and is used to validate the block formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import SteeringSet, build_steering, check_hermitian
from .config import Scenario
from .errors import IsacError, UnidentifiableError

COND_LIMIT = 1e12


@dataclass(frozen=True)
class NoiseModel:
    """Receive noise covariance ``Q`` (N_r x N_r), i.i.d. across snapshots."""

    Q: np.ndarray

    def __post_init__(self):
        Q = check_hermitian(self.Q, name="Q")
        w = np.linalg.eigvalsh(Q)
        if w.max() <= 0 or w.min() <= 1e-12 * w.max():
            raise IsacError("noise covariance Q is singular or not positive definite")
        object.__setattr__(self, "Q", Q)

    @classmethod
    def white(cls, sigma_s_sq: float, n_r: int) -> "NoiseModel":
        return cls(sigma_s_sq * np.eye(n_r))

    @property
    def Q_inv(self) -> np.ndarray:
        return np.linalg.inv(self.Q)

    def white_level(self) -> float | None:
        q = self.Q[0, 0].real
        if np.allclose(self.Q, q * np.eye(self.Q.shape[0]), rtol=0, atol=1e-14 * q):
            return float(q)
        return None


@dataclass(frozen=True)
class Fim:
    F11: np.ndarray
    F12: np.ndarray
    F22: np.ndarray
    F: np.ndarray
    T: int
    alpha: np.ndarray

    @property
    def num_targets(self) -> int:
        return self.F11.shape[0]


def param_names(k: int) -> list[str]:
    return ([f"theta_{i + 1}" for i in range(k)]
            + [f"re_alpha_{i + 1}" for i in range(k)]
            + [f"im_alpha_{i + 1}" for i in range(k)])


def assemble_fim(F11, F12, F22) -> np.ndarray:
    F11, F12, F22 = (np.atleast_2d(np.asarray(x, dtype=complex)) for x in (F11, F12, F22))
    F = 2.0 * np.block([
        [F11.real, F12.real, -F12.imag],
        [F12.real.T, F22.real, -F22.imag],
        [-F12.imag.T, -F22.imag.T, F22.real],
    ])
    return 0.5 * (F + F.T)


def _fim(F11, F12, F22, T, alpha) -> Fim:
    return Fim(F11=F11, F12=F12, F22=F22, F=assemble_fim(F11, F12, F22), T=T,
               alpha=np.atleast_1d(np.asarray(alpha, dtype=complex)))


def fim_multi(ss: SteeringSet, alpha, R, noise: NoiseModel, T: int) -> Fim:
    """Block-formula FIM for K targets with arbitrary noise covariance."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    R = np.asarray(R, dtype=complex)
    k = ss.num_targets
    if alpha.size != k:
        raise IsacError(f"{alpha.size} reflection coefficients for {k} targets")
    if R.shape != (ss.n_t, ss.n_t):
        raise IsacError(f"R has shape {R.shape}, expected {(ss.n_t, ss.n_t)}")
    if noise.Q.shape != (ss.n_r, ss.n_r):
        raise IsacError(f"Q has shape {noise.Q.shape}, expected {(ss.n_r, ss.n_r)}")
    if T < 1:
        raise IsacError("T must be >= 1")

    A, Ad, B, Bd = ss.A, ss.A_dot, ss.B, ss.B_dot
    Qi = noise.Q_inv
    RT = R.T
    Sc = np.diag(alpha.conj())
    S = np.diag(alpha)

    dd = Bd.conj().T @ Qi @ Bd
    db = Bd.conj().T @ Qi @ B
    bd = B.conj().T @ Qi @ Bd
    bb = B.conj().T @ Qi @ B
    aRa = A.conj().T @ RT @ A
    aRad = A.conj().T @ RT @ Ad
    adRa = Ad.conj().T @ RT @ A
    adRad = Ad.conj().T @ RT @ Ad

    F11 = T * (dd * (Sc @ aRa @ S) + db * (Sc @ aRad @ S)
               + bd * (Sc @ adRa @ S) + bb * (Sc @ adRad @ S))
    F12 = T * (db * (Sc @ aRa) + bb * (Sc @ adRa))
    F22 = T * (bb * aRa)
    return _fim(F11, F12, F22, T, alpha)


def fim_single(scn: Scenario, R) -> Fim:
    """3 x 3 FIM of one target under white noise, from the scalar entry formulas."""
    scn.require_single_target()
    R = np.asarray(R, dtype=complex)
    a, ad = build_steering(scn.theta, scn.n_t)
    _, bd = build_steering(scn.theta, scn.n_r)
    alpha = scn.alpha
    g = scn.T / scn.sigma_s_sq
    # tr(x* y^T R) = y^T R x*
    t_aa = a @ R @ a.conj()
    t_dd = ad @ R @ ad.conj()
    t_ad = a @ R @ ad.conj()
    F11 = g * abs(alpha) ** 2 * (np.vdot(bd, bd).real * t_aa + t_dd)
    F12 = g * np.conj(alpha) * t_ad
    F22 = g * t_aa
    return _fim(np.array([[F11]]), np.array([[F12]]), np.array([[F22]]), scn.T, alpha)


def _as_matrix(F) -> np.ndarray:
    return F.F if isinstance(F, Fim) else np.asarray(F, dtype=float)


def crb_trace(F) -> float:
    """``tr(F^-1)``; raises :class:`UnidentifiableError` for singular ``F``."""
    M = _as_matrix(F)
    w, v = np.linalg.eigh(M)
    if w.max() <= 0 or w.min() <= w.max() / COND_LIMIT:
        names = param_names(M.shape[0] // 3) if M.shape[0] % 3 == 0 else [f"p{i}" for i in range(M.shape[0])]
        null = v[:, 0]
        worst = names[int(np.argmax(np.abs(null)))]
        raise UnidentifiableError(
            f"FIM is singular or ill-conditioned (eigenvalues {w.min():.3g}..{w.max():.3g}); "
            f"null direction dominated by {worst}",
            direction=worst,
        )
    return float(np.sum(1.0 / w))


def angle_crb_schur(F: Fim) -> float:
    """``0.5 / (F11 - |F12|^2 / F22)`` for a single target."""
    if F.num_targets != 1:
        raise IsacError("angle_crb_schur needs a single-target FIM")
    f11 = F.F11[0, 0].real
    f12 = F.F12[0, 0]
    f22 = F.F22[0, 0].real
    if not f22 > 0:
        raise UnidentifiableError("F22 = 0: reflection coefficient is unidentifiable", direction="re_alpha_1")
    schur = f11 - abs(f12) ** 2 / f22
    if not schur > 1e-12 * max(abs(f11), 1e-300):
        raise UnidentifiableError("angle Schur complement is not positive", direction="theta_1")
    return 0.5 / schur


def bdot_norm_sq(scn: Scenario) -> float:
    _, bd = build_steering(scn.theta, scn.n_r)
    return float(np.vdot(bd, bd).real)


def angle_crb_closed(nu1_sq: float, scn: Scenario) -> float:
    """Angle CRB of a rank-1 waveform in the (a_u, a_d, a_h) basis: depends on ``|nu_1|^2`` only."""
    if not nu1_sq > 0:
        raise UnidentifiableError("|nu_1|^2 = 0: no power on a*, the angle CRB is infinite", direction="theta_1")
    return scn.sigma_s_sq / (2.0 * scn.T * abs(scn.alpha) ** 2 * nu1_sq * bdot_norm_sq(scn))


def fim_det_closed(nu1_abs: float, scn: Scenario) -> float:
    """``det F = 8 T^3 |alpha|^2 sigma_s^-6 ||b_dot||^2 |nu_1|^6``."""
    scn.require_single_target()
    return (8.0 * scn.T ** 3 * abs(scn.alpha) ** 2 * scn.sigma_s_sq ** -3
            * bdot_norm_sq(scn) * nu1_abs ** 6)


def psd_sqrt(R: np.ndarray) -> np.ndarray:
    R = 0.5 * (R + R.conj().T)
    w, v = np.linalg.eigh(R)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def synthesize_waveform(R, T: int) -> np.ndarray:
    """Return ``X`` (N_t x T) with ``X X^H / T == R`` up to roundoff.

    ``X = sqrt(T) R^{1/2} W`` where ``W`` holds the first N_t rows of the unitary
    DFT matrix of size T, so ``W W^H = I`` exactly in exact arithmetic.
    """
    R = np.asarray(R, dtype=complex)
    n = R.shape[0]
    if T < n:
        raise IsacError(f"T={T} < N_t={n}: cannot realize R exactly")
    idx = np.arange(T)
    W = np.exp(-2j * np.pi * np.outer(np.arange(n), idx) / T) / np.sqrt(T)
    return np.sqrt(T) * psd_sqrt(R) @ W


def _echo(angles, alpha, X, n_r):
    n_t = X.shape[0]
    A = np.column_stack([build_steering(th, n_t)[0] for th in angles])
    B = np.column_stack([build_steering(th, n_r)[0] for th in angles])
    return B @ np.diag(alpha) @ A.T @ X


def fim_fd_oracle(ss: SteeringSet, alpha, R, noise: NoiseModel, T: int, step: float = 1e-5) -> Fim:
    """FIM from central finite differences of the noiseless echo.

    ``F_ij = 2 Re sum_t (d mu_t/d p_i)^H Q^-1 (d mu_t/d p_j)`` with the mean
    ``mu = B diag(alpha) A^T X`` and a waveform realizing ``R`` exactly.
    The returned blocks F11/F12/F22 are read back off the assembled matrix.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    angles = np.asarray(ss.angles, dtype=float)
    k = angles.size
    X = synthesize_waveform(R, T)
    n_r = ss.n_r
    Qi = noise.Q_inv

    derivs = []
    for i in range(3 * k):
        ang_p, ang_m = angles.copy(), angles.copy()
        al_p, al_m = alpha.copy(), alpha.copy()
        j = i % k
        if i < k:
            ang_p[j] += step
            ang_m[j] -= step
        elif i < 2 * k:
            al_p[j] += step
            al_m[j] -= step
        else:
            al_p[j] += 1j * step
            al_m[j] -= 1j * step
        d = (_echo(ang_p, al_p, X, n_r) - _echo(ang_m, al_m, X, n_r)) / (2.0 * step)
        derivs.append(d)

    n = 3 * k
    F = np.empty((n, n))
    for i in range(n):
        Qd = Qi @ derivs[i]
        for j in range(i, n):
            F[i, j] = F[j, i] = 2.0 * np.real(np.vdot(derivs[j], Qd))
    # block view: F = 2[[Re F11, Re F12, -Im F12], [., Re F22, -Im F22], ...]
    F11 = F[:k, :k] / 2.0 + 0j
    F12 = (F[:k, k:2 * k] - 1j * F[:k, 2 * k:]) / 2.0
    F22 = (F[k:2 * k, k:2 * k] - 1j * F[k:2 * k, 2 * k:]) / 2.0
    return Fim(F11=F11, F12=F12, F22=F22, F=F, T=T, alpha=alpha)
