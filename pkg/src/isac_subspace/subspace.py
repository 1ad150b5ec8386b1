"""ISAC subspace, the three-vector orthonormal basis and the correlation coefficient G."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .array_model import SteeringSet
from .channel_model import CommChannel
from .closed_form import ZERO_GAIN, nu1_sq_antiderivative, nu1_sq_formula, quad_coeffs
from .errors import InfeasibleError, IsacError

RANK_TOL = 1e-10
BOUNDARY_RTOL = 1e-10


@dataclass(frozen=True)
class IsacSubspace:
    U: np.ndarray
    P_U: np.ndarray
    rank: int

    def project(self, R: np.ndarray) -> np.ndarray:
        return self.P_U @ R @ self.P_U

    def residual(self, u: np.ndarray) -> float:
        """``||(I - P_U) u|| / ||u||``."""
        u = np.asarray(u, dtype=complex)
        n = np.linalg.norm(u)
        return float(np.linalg.norm(u - self.P_U @ u) / n) if n > 0 else 0.0


def isac_basis(ss: SteeringSet, ch: CommChannel) -> IsacSubspace:
    """Span of ``[A*, A_dot*, V_c]`` and its orthogonal projector."""
    U = np.hstack([ss.A.conj(), ss.A_dot.conj(), ch.V_c])
    left, s, _ = np.linalg.svd(U, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s.max()))
    Q = left[:, :rank]
    P_U = Q @ Q.conj().T
    return IsacSubspace(U=U, P_U=0.5 * (P_U + P_U.conj().T), rank=rank)


@dataclass(frozen=True)
class OrthoBasis:
    a_u: np.ndarray
    a_d: np.ndarray
    a_h: np.ndarray
    gains: np.ndarray  # |h^H a_u|, |h^H a_d|, |h^H a_h|
    zeta: np.ndarray  # -angle(h^H a_l)
    degenerate_h: bool
    h_norm_sq: float

    @property
    def c1(self) -> float:
        return float(self.gains[0])

    @property
    def c2(self) -> float:
        return float(self.gains[1])

    @property
    def c3(self) -> float:
        return float(self.gains[2])

    @property
    def matrix(self) -> np.ndarray:
        return np.column_stack([self.a_u, self.a_d, self.a_h])

    def gamma_max(self, P: float) -> float:
        return P * self.h_norm_sq

    def gamma_threshold(self, P: float) -> float:
        """Received power below which the rate constraint is slack at the optimum."""
        return P * self.c1 ** 2

    def vector(self, magnitudes) -> np.ndarray:
        """``u = sum_l |nu_l| exp(j zeta_l) a_l``."""
        nu = np.asarray(magnitudes, dtype=float) * np.exp(1j * self.zeta)
        return self.matrix @ nu


def ortho_basis(h, a, a_dot) -> OrthoBasis:
    """Gram-Schmidt of ``h`` against ``a*`` and the normalized ``a_dot*``."""
    h = np.asarray(h, dtype=complex).ravel()
    hn = np.linalg.norm(h)
    if hn == 0:
        raise IsacError("channel vector h is zero")
    a_u = np.asarray(a, dtype=complex).conj()
    a_d = np.asarray(a_dot, dtype=complex).conj()
    a_d = a_d / np.linalg.norm(a_d)
    r = h - np.vdot(a_u, h) * a_u - np.vdot(a_d, h) * a_d
    rn = np.linalg.norm(r)
    degenerate = rn < 1e-10 * hn
    a_h = np.zeros_like(h) if degenerate else r / rn

    proj = np.array([np.vdot(h, a_u), np.vdot(h, a_d), np.vdot(h, a_h)])
    gains = np.abs(proj)
    zeta = np.where(gains > 0, -np.angle(proj), 0.0)
    if degenerate:
        gains[2] = 0.0
        zeta[2] = 0.0
    return OrthoBasis(a_u=a_u, a_d=a_d, a_h=a_h, gains=gains, zeta=zeta,
                      degenerate_h=bool(degenerate), h_norm_sq=float(hn ** 2))


def nu1_sq_closed(Gamma: float, basis: OrthoBasis, P: float) -> float:
    """Optimal power on ``a*`` as an explicit function of the threshold Gamma."""
    gmax = basis.gamma_max(P)
    if Gamma > gmax * (1.0 + BOUNDARY_RTOL):
        raise InfeasibleError(Gamma, gmax)
    if Gamma <= basis.gamma_threshold(P):
        return float(P)
    c1, c2, c3 = basis.gains
    if Gamma >= gmax * (1.0 - BOUNDARY_RTOL):
        # boundary: all power along h
        return float(P * c1 ** 2 / basis.h_norm_sq)
    if c1 <= ZERO_GAIN * np.sqrt(basis.h_norm_sq):
        s2 = c2 ** 2 + c3 ** 2
        return float(max(P - Gamma / s2, 0.0))
    q = quad_coeffs(c1, c2, c3, P, Gamma)
    return float(nu1_sq_formula(min(Gamma, gmax), P, c1, q))


def _g_analytic(basis: OrthoBasis, P: float, g1: float, g2: float) -> float:
    c1, c2, c3 = basis.gains
    th = basis.gamma_threshold(P)
    flat = P * max(min(g2, th) - g1, 0.0)
    lo, hi = max(g1, th), g2
    if hi <= lo:
        return flat
    if c1 <= ZERO_GAIN * np.sqrt(basis.h_norm_sq):
        s2 = c2 ** 2 + c3 ** 2
        return flat + P * (hi - lo) - (hi ** 2 - lo ** 2) / (2.0 * s2)
    # quadratic coefficients other than B, C do not depend on Gamma
    q = quad_coeffs(c1, c2, c3, P, lo)
    return flat + float(nu1_sq_antiderivative(hi, P, c1, q) - nu1_sq_antiderivative(lo, P, c1, q))


def _g_quadrature(basis: OrthoBasis, P: float, g1: float, g2: float) -> float:
    if g2 <= g1:
        return 0.0
    th = basis.gamma_threshold(P)
    points = [th] if g1 < th < g2 else None
    val, _ = integrate.quad(lambda g: nu1_sq_closed(g, basis, P), g1, g2,
                            epsabs=1e-9 * P * (g2 - g1), epsrel=1e-12, limit=200, points=points)
    return float(val)


@dataclass(frozen=True)
class CorrelationReport:
    Gamma1: float
    Gamma2: float
    Gamma_max: float
    G_analytic: float
    G_quadrature: float
    mode: str = "analytic"
    G_normalized: float | None = None
    channel_id: int | None = None
    seed: int | None = None

    @property
    def G(self) -> float:
        return self.G_analytic if self.mode == "analytic" else self.G_quadrature


def corr_coeff(basis: OrthoBasis, P: float, Gamma1: float, Gamma2: float, mode: str = "analytic",
               channel_id: int | None = None, seed: int | None = None) -> CorrelationReport:
    """Area under the ``|nu_1*|^2``-versus-Gamma curve on ``[Gamma1, Gamma2]``.

    Both the closed-form antiderivative and adaptive quadrature are evaluated;
    ``mode`` picks which one is reported as ``G``.
    """
    if mode not in ("analytic", "quadrature"):
        raise IsacError(f"unknown mode {mode!r}")
    gmax = basis.gamma_max(P)
    if not 0.0 <= Gamma1 <= Gamma2:
        raise IsacError("need 0 <= Gamma1 <= Gamma2")
    if Gamma2 > gmax * (1.0 + BOUNDARY_RTOL):
        raise InfeasibleError(Gamma2, gmax)
    Gamma2 = min(Gamma2, gmax)
    Gamma1 = min(Gamma1, Gamma2)
    if basis.c2 == 0.0 and basis.c3 == 0.0:
        # constant integrand: the whole feasible range is slack
        g = P * (Gamma2 - Gamma1)
        return CorrelationReport(Gamma1, Gamma2, gmax, g, g, mode, channel_id=channel_id, seed=seed)
    return CorrelationReport(
        Gamma1, Gamma2, gmax,
        G_analytic=_g_analytic(basis, P, Gamma1, Gamma2),
        G_quadrature=_g_quadrature(basis, P, Gamma1, Gamma2),
        mode=mode, channel_id=channel_id, seed=seed,
    )


def normalize_reports(reports):
    reports = list(reports)
    if not reports:
        raise IsacError("no reports to normalize")
    values = np.array([r.G for r in reports])
    if np.any(values < 0):
        raise IsacError("G values must be nonnegative")
    top = values.max()
    if top <= 0:
        raise IsacError("all G values are zero; normalization undefined")
    return [replace(r, G_normalized=float(v / top)) for r, v in zip(reports, values)]
