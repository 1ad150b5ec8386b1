"""Uniform linear array steering vectors and transmit beampatterns.

Elements sit at half-wavelength spacing and are indexed symmetrically about
the array centre, ``m = -(N-1)/2, ..., (N-1)/2``.  With that phase reference a
steering vector is exactly orthogonal to its angle derivative, and every
steering vector has unit Euclidean norm.
"""

from __future__ import annotations

from dataclasses import dataclass
import warnings

import numpy as np

from .errors import IsacError


@dataclass(frozen=True)
class UlaConfig:
    num_elements: int

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 2:
            raise IsacError(f"a ULA needs at least 2 elements, got {self.num_elements!r}")

    @property
    def indices(self) -> np.ndarray:
        return centered_indices(self.num_elements)


@dataclass(frozen=True)
class SteeringSet:
    """Transmit/receive steering matrices for a list of targets (one column each)."""

    A: np.ndarray
    A_dot: np.ndarray
    B: np.ndarray
    B_dot: np.ndarray
    angles: np.ndarray

    @property
    def num_targets(self) -> int:
        return self.A.shape[1]

    @property
    def n_t(self) -> int:
        return self.A.shape[0]

    @property
    def n_r(self) -> int:
        return self.B.shape[0]


def centered_indices(n: int) -> np.ndarray:
    return np.arange(n) - (n - 1) / 2.0


def _check_angle(theta: float):
    if not np.isfinite(theta) or abs(theta) >= np.pi / 2:
        raise IsacError(
            f"angle {theta!r} rad is outside (-pi/2, pi/2); "
            "cos(theta) = 0 makes the angle unidentifiable"
        )


def build_steering(theta: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Return the unit-norm steering vector ``a(theta)`` and its derivative.

    :param theta: angle in radians, strictly inside (-pi/2, pi/2)
    :param n: number of array elements (>= 2)
    :return: ``(a, a_dot)`` complex vectors of length ``n``
    """
    UlaConfig(n)
    _check_angle(theta)
    m = centered_indices(n)
    a = np.exp(1j * np.pi * m * np.sin(theta)) / np.sqrt(n)
    a_dot = 1j * np.pi * m * np.cos(theta) * a
    return a, a_dot


def build_steering_set(angles, n_t: int, n_r: int) -> SteeringSet:
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    k = angles.size
    if k == 0:
        raise IsacError("at least one target angle is required")
    if np.unique(angles).size != k:
        raise IsacError("target angles must be pairwise distinct (duplicates make the FIM singular)")
    if k > min(n_t, n_r):
        warnings.warn(
            f"{k} targets exceed min(n_t, n_r) = {min(n_t, n_r)}; the FIM may be rank deficient",
            stacklevel=2,
        )
    tx = [build_steering(th, n_t) for th in angles]
    rx = [build_steering(th, n_r) for th in angles]
    return SteeringSet(
        A=np.column_stack([t[0] for t in tx]),
        A_dot=np.column_stack([t[1] for t in tx]),
        B=np.column_stack([r[0] for r in rx]),
        B_dot=np.column_stack([r[1] for r in rx]),
        angles=angles,
    )


def check_hermitian(R: np.ndarray, tol: float = 1e-9, name: str = "R") -> np.ndarray:
    R = np.asarray(R, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise IsacError(f"{name} must be a square matrix, got shape {R.shape}")
    scale = max(1.0, float(np.max(np.abs(R)))) if R.size else 1.0
    if np.max(np.abs(R - R.conj().T), initial=0.0) > tol * scale:
        raise IsacError(f"{name} is not Hermitian")
    return R


def beampattern(R: np.ndarray, theta_grid) -> np.ndarray:
    """Transmit power ``a(theta)^T R a(theta)^*`` on a grid of angles (radians)."""
    R = check_hermitian(R)
    n = R.shape[0]
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    m = centered_indices(n)
    # endpoints +-pi/2 are fine here: no derivative is involved
    steer = np.exp(1j * np.pi * np.outer(np.sin(theta_grid), m)) / np.sqrt(n)
    p = np.einsum("gi,ij,gj->g", steer, R, steer.conj()).real
    return np.clip(p, 0.0, None)
