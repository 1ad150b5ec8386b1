"""Communication channel, Rayleigh draws, achievable rate and SNR thresholds.

Random channels come from numpy's ``PCG64`` bit generator seeded directly with
the given integer; entries are ``(x + j y)/sqrt(2)`` with ``x, y`` drawn by
``Generator.standard_normal`` (real parts first, then imaginary parts).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IsacError

RANK_TOL = 1e-10


@dataclass(frozen=True)
class CommChannel:
    """User channel ``H`` (N_u x N_t). For a single-antenna user ``H = h^H``."""

    H: np.ndarray
    sigma_c_sq: float = 1.0
    V_c: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=complex))
        if self.sigma_c_sq <= 0:
            raise IsacError("sigma_c_sq must be positive")
        object.__setattr__(self, "H", H)
        _, s, vh = np.linalg.svd(H, full_matrices=False)
        rank = int(np.sum(s > RANK_TOL * max(s.max(initial=0.0), 1e-300)))
        object.__setattr__(self, "V_c", vh[:rank].conj().T)

    @classmethod
    def from_vector(cls, h, sigma_c_sq: float = 1.0) -> "CommChannel":
        h = np.asarray(h, dtype=complex).ravel()
        return cls(h.conj()[None, :], sigma_c_sq)

    @property
    def n_t(self) -> int:
        return self.H.shape[1]

    @property
    def n_u(self) -> int:
        return self.H.shape[0]

    @property
    def h(self) -> np.ndarray:
        """Channel vector ``h`` of a single-antenna user (so that ``H = h^H``)."""
        if self.n_u != 1:
            raise IsacError("h is only defined for a single-antenna user")
        return self.H[0].conj()

    @property
    def Q_c(self) -> np.ndarray:
        return self.H.conj().T @ self.H

    def gamma_max(self, P: float) -> float:
        """Largest received power ``P * ||h||^2`` (mW) reachable with budget ``P``."""
        return float(P * np.linalg.norm(self.h) ** 2)


@dataclass(frozen=True)
class RateConstraint:
    gamma: float  # bits/s/Hz
    Gamma: float  # mW received signal power
    sigma_c_sq: float


def draw_rayleigh_channel(seed: int, n_t: int, normalize: bool = False,
                          sigma_c_sq: float = 1.0, n_u: int = 1) -> CommChannel:
    if n_t < 1 or n_u < 1:
        raise IsacError("channel dimensions must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    re = rng.standard_normal((n_u, n_t))
    im = rng.standard_normal((n_u, n_t))
    H = (re + 1j * im) / np.sqrt(2.0)
    if normalize:
        H = H / np.linalg.norm(H)
    return CommChannel(H, sigma_c_sq)


def check_psd(R: np.ndarray, tol: float = 1e-9, name: str = "R") -> np.ndarray:
    R = np.asarray(R, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise IsacError(f"{name} must be square")
    herm = 0.5 * (R + R.conj().T)
    if np.max(np.abs(R - herm), initial=0.0) > tol * max(1.0, np.max(np.abs(R), initial=0.0)):
        raise IsacError(f"{name} is not Hermitian")
    if R.size and np.linalg.eigvalsh(herm).min() < -tol * max(1.0, np.abs(herm).max()):
        raise IsacError(f"{name} is not positive semidefinite")
    return herm


def achievable_rate(R: np.ndarray, ch: CommChannel) -> float:
    """``log2 det(I + H R H^H / sigma_c^2)`` in bits/s/Hz."""
    R = check_psd(R)
    if R.shape[0] != ch.n_t:
        raise IsacError(f"R is {R.shape[0]}x{R.shape[0]} but the channel has {ch.n_t} inputs")
    M = np.eye(ch.n_u) + ch.H @ R @ ch.H.conj().T / ch.sigma_c_sq
    sign, logdet = np.linalg.slogdet(M)
    return max(float(logdet) / np.log(2.0), 0.0)


def snr_threshold(gamma: float, sigma_c_sq: float) -> RateConstraint:
    """Rate threshold (bits/s/Hz) -> received-power threshold ``(2^gamma - 1) sigma_c^2``."""
    if gamma < 0 or sigma_c_sq <= 0:
        raise IsacError("gamma must be >= 0 and sigma_c_sq > 0")
    return RateConstraint(gamma, float(np.expm1(gamma * np.log(2.0)) * sigma_c_sq), sigma_c_sq)


def gamma_of_Gamma(Gamma: float, sigma_c_sq: float) -> float:
    """Inverse of :func:`snr_threshold`: received power (mW) -> rate (bits/s/Hz)."""
    if Gamma < 0 or sigma_c_sq <= 0:
        raise IsacError("Gamma must be >= 0 and sigma_c_sq > 0")
    return float(np.log1p(Gamma / sigma_c_sq) / np.log(2.0))
