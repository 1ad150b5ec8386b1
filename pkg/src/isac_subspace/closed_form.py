"""Scalar algebra behind the rank-1 optimum in the three-vector basis.

With phases aligned, the reduced problem is over magnitudes ``x = |nu|``::

    max x1   s.t.  c1 x1 + c2 x2 + c3 x3 = sqrt(Gamma),  x1^2 + x2^2 + x3^2 = P

Eliminating ``x2 = (c2/c3) x3`` and ``x1 = (sqrt(Gamma) - vs * x3) / c1`` with
``vs = (c2^2 + c3^2) / c3`` leaves ``A x3^2 + B x3 + C = 0``.  The smaller root
maximizes ``x1``; it is nonnegative only when ``Gamma >= P c1^2`` (below that
threshold the rate constraint is slack and ``x = (sqrt(P), 0, 0)``).

When ``c3 == 0`` (channel inside the sensing subspace) the ``a_h`` coordinate is
dropped and the same quadratic is solved for ``x2`` with ``vs = c2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ZERO_GAIN = 1e-12


@dataclass(frozen=True)
class QuadCoeffs:
    varsigma: float
    epsilon: float
    varpi: float
    A: float
    B: float
    C: float
    drop_ah: bool = False

    def as_tuple(self):
        return (self.varsigma, self.epsilon, self.varpi, self.A, self.B, self.C)


def quad_coeffs(c1: float, c2: float, c3: float, P: float, Gamma: float,
                varsigma: float | None = None) -> QuadCoeffs:
    """Coefficients of the magnitude quadratic.

    ``varsigma`` overrides the computed value; only the validation suite uses
    this, to check that a wrong constant is caught by the oracle.
    """
    drop_ah = c3 <= ZERO_GAIN
    if drop_ah:
        vs = c2 if varsigma is None else varsigma
        A = vs ** 2 / c1 ** 2 + 1.0
    else:
        vs = (c2 ** 2 + c3 ** 2) / c3 if varsigma is None else varsigma
        A = vs ** 2 / c1 ** 2 + c2 ** 2 / c3 ** 2 + 1.0
    eps = vs ** 2 / (A * c1 ** 2)
    varpi = (1.0 - eps) / (A * c1 ** 2)
    B = -2.0 * vs * np.sqrt(Gamma) / c1 ** 2
    C = Gamma / c1 ** 2 - P
    return QuadCoeffs(vs, eps, varpi, A, B, C, drop_ah)


def active_magnitudes(c1, c2, c3, P, Gamma, coeffs: QuadCoeffs | None = None):
    """Magnitudes ``(x1, x2, x3)`` in the active-constraint regime."""
    q = coeffs or quad_coeffs(c1, c2, c3, P, Gamma)
    disc = max(q.B ** 2 - 4.0 * q.A * q.C, 0.0)
    last = max((-q.B - np.sqrt(disc)) / (2.0 * q.A), 0.0)
    x1 = (np.sqrt(Gamma) - q.varsigma * last) / c1
    if q.drop_ah:
        return x1, last, 0.0
    return x1, (c2 / c3) * last, last


def nu1_sq_formula(Gamma, P, c1, q: QuadCoeffs):
    """``|nu_1|^2`` as an explicit function of Gamma (active regime only)."""
    Gamma = np.asarray(Gamma, dtype=float)
    p = P / q.A
    rad = np.clip(p - q.varpi * Gamma, 0.0, None)
    cross = np.sqrt(np.clip(p * Gamma - q.varpi * Gamma ** 2, 0.0, None))
    val = ((1.0 - q.epsilon) ** 2 * Gamma + q.varsigma ** 2 * rad
           + 2.0 * q.varsigma * (1.0 - q.epsilon) * cross)
    return val / c1 ** 2


def _sqrt_quadratic_antiderivative(Gamma, p, w):
    """Antiderivative of ``sqrt(p g - w g^2)`` for ``w > 0`` on ``[0, p/w]``."""
    arg = np.clip((2.0 * w * Gamma - p) / p, -1.0, 1.0)
    root = np.sqrt(np.clip(p * Gamma - w * Gamma ** 2, 0.0, None))
    return (2.0 * w * Gamma - p) / (4.0 * w) * root + p ** 2 / (8.0 * w ** 1.5) * np.arcsin(arg)


def nu1_sq_antiderivative(Gamma, P, c1, q: QuadCoeffs):
    """Antiderivative of :func:`nu1_sq_formula` with respect to Gamma."""
    p = P / q.A
    poly = (0.5 * (1.0 - q.epsilon) ** 2 * Gamma ** 2
            + q.varsigma ** 2 * (p * Gamma - 0.5 * q.varpi * Gamma ** 2))
    arc = 2.0 * q.varsigma * (1.0 - q.epsilon) * _sqrt_quadratic_antiderivative(Gamma, p, q.varpi)
    return (poly + arc) / c1 ** 2
