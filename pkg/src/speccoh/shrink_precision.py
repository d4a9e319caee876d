"""Shrinkage of the precision matrix ``C = S^-1``.

Model: ``C* = alpha * S_hat^-1 + beta * I``. Both risks below are quadratic
in ``(alpha, beta)`` and need the second inverse-Wishart moments, which exist
only for ``K > p + 1``.

* HSP minimises ``E tr{(C* - S^-1)^2}``.
* QLP minimises ``E tr{(C* S - I)^2}``; it only involves ``tr{S}`` and
  ``tr{S^2}``, which are far easier to estimate than inverse traces.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateTracesError, InsufficientTapersError
from .hermitian import HermitianMatrix, Provenance, TraceSet, inv_pd
from .shrink_spectral import Method, ShrinkageSolution, _positive_denominator, affine

# floating-point slack on the (analytically nonnegative) sphericity numerator
_SPHERICITY_SLACK = -1e-12


def _check_inputs(t: TraceSet, p: int, k: int):
    if k <= p + 1:
        raise InsufficientTapersError(
            f"precision shrinkage needs K > p + 1, got K={k}, p={p}"
        )
    t.check_positive()


def _sphericity(sq, lin, p):
    """``p * tr{A^2} / tr^2{A} - 1``; zero iff ``A`` is a scaled identity."""
    lin2 = np.asarray(lin) ** 2
    return (p * np.asarray(sq) - lin2) / lin2


def _finish(method, t, alpha, beta, alpha_at_zero_beta):
    """Clip a negative ``alpha``, re-optimising ``beta`` on the ``alpha = 0`` edge."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    negative = alpha < 0
    tiny = negative & (alpha >= _SPHERICITY_SLACK)
    clamped = negative & ~tiny
    if np.any(clamped) and t.provenance is Provenance.ORACLE:
        raise DegenerateTracesError(
            "negative sphericity statistic: oracle traces violate Cauchy-Schwarz"
        )
    alpha = np.where(negative, 0.0, alpha)
    beta = np.where(clamped, alpha_at_zero_beta, beta)
    if alpha.ndim == 0:
        return ShrinkageSolution(method, float(alpha), float(beta), clamped=bool(clamped))
    return ShrinkageSolution(method, alpha, beta, clamped=clamped)


def hsp_oracle(t: TraceSet, p: int, k: int) -> ShrinkageSolution:
    """HS-optimal precision shrinkage.

    With ``r = tr{S^-2}/tr^2{S^-1}``, ``m = K - p`` and
    ``c3 = K/(m^3 - m)``::

        D     = c3 p m^2 r + c3 p m - K/m
        alpha = (p r - 1) / D
        beta  = c3 tr{S^-1} (r + m) / D

    Returns ``alpha = 0, beta = 1/c`` exactly when ``S = c I``.
    """
    _check_inputs(t, p, k)
    m = k - p
    c3 = k / (m**3 - m)
    tr_sinv = np.asarray(t.tr_sinv, dtype=float)
    r = np.asarray(t.tr_sinv2) / tr_sinv**2
    d = _positive_denominator(c3 * p * m**2 * r + c3 * p * m - k / m, "HSP")
    alpha = _sphericity(t.tr_sinv2, t.tr_sinv, p) / d
    beta = c3 * tr_sinv * (r + m) / d
    return _finish(Method.HSP, t, alpha, beta, tr_sinv / p)


def qlp_oracle(t: TraceSet, p: int, k: int) -> ShrinkageSolution:
    """QL-optimal precision shrinkage.

    With ``r = tr{S^2}/tr^2{S}`` and ``c0 = K^2/((K-p)^2 - 1)``::

        D     = c0 p r - K/(K-p)
        alpha = (p r - 1) / D
        beta  = p (c0 - K/(K-p)) / (D tr{S})
    """
    _check_inputs(t, p, k)
    m = k - p
    c0 = k**2 / (m**2 - 1)
    tr_s = np.asarray(t.tr_s, dtype=float)
    r = np.asarray(t.tr_s2) / tr_s**2
    d = _positive_denominator(c0 * p * r - k / m, "QLP")
    alpha = _sphericity(t.tr_s2, t.tr_s, p) / d
    beta = p * (c0 - k / m) / (d * tr_s)
    return _finish(Method.QLP, t, alpha, beta, tr_s / np.asarray(t.tr_s2))


def apply_precision_affine(s_hat: HermitianMatrix, sol: ShrinkageSolution) -> HermitianMatrix:
    """``alpha * S_hat^-1 + beta * I``; raises if ``S_hat`` is not invertible."""
    return HermitianMatrix(affine(inv_pd(s_hat.entries), sol.alpha, sol.beta))
