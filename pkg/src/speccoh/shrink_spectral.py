"""Shrinkage of the spectral matrix towards a scaled identity.

All estimators share the form ``alpha * S_hat + beta * I``, equivalently
``(1 - rho) * S_hat + rho * eta * I``. The coefficients below minimise the
risk under either Hilbert-Schmidt (HS) loss ``E tr{(S* - S)^2}`` or quadratic
loss (QL) ``E tr{(S* S^-1 - I)^2}`` when ``K S_hat`` is complex Wishart with
``K`` degrees of freedom.

The coefficient functions accept a :class:`~speccoh.hermitian.TraceSet`
whose fields may be arrays, in which case one solution per element is
returned (the Monte-Carlo driver relies on this for the ``-est`` variants).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateTracesError,
    InsufficientTapersError,
    NonPositiveDenominatorError,
)
from .hermitian import HermitianMatrix, TraceSet


class Method(str, enum.Enum):
    HS = "HS"
    QLA = "QLa"
    QLB = "QLb"
    HSP = "HSP"
    QLP = "QLP"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ShrinkageSolution:
    """Affine shrinkage coefficients ``alpha * X + beta * I``.

    For the spectral estimators ``eta`` (target scale) and ``rho`` (convex
    weight) are also stored, with ``alpha = 1 - rho`` and ``beta = rho * eta``.
    ``clamped`` records whether a coefficient had to be clipped into its
    admissible range; this only happens with estimated trace inputs.
    """

    method: Method
    alpha: float
    beta: float
    eta: Optional[float] = None
    rho: Optional[float] = None
    clamped: object = False


def _check_inputs(t: TraceSet, p: int, k: int):
    if k < p:
        raise InsufficientTapersError(f"need K >= p, got K={k}, p={p}")
    t.check_positive()


def _from_eta_rho(method, eta, rho):
    """Clip ``rho`` to [0, 1] and convert to (alpha, beta)."""
    rho = np.asarray(rho, dtype=float)
    clipped = np.clip(rho, 0.0, 1.0)
    clamped = clipped != rho
    eta = np.asarray(eta, dtype=float)
    alpha = 1.0 - clipped
    beta = clipped * eta
    if clipped.ndim == 0:
        return ShrinkageSolution(
            method, float(alpha), float(beta), float(eta), float(clipped), bool(clamped)
        )
    return ShrinkageSolution(method, alpha, beta, eta, clipped, clamped)


def _positive_denominator(den, what):
    den = np.asarray(den, dtype=float)
    if not np.all(np.isfinite(den)) or np.any(den <= 0):
        raise NonPositiveDenominatorError(
            f"{what} denominator is not positive; trace inputs are inconsistent"
        )
    return den


def hs_rho(tr_s, tr_s2, p, k):
    """HS-optimal weight ``[1 - K/p + K tr{S^2}/tr^2{S}]^-1`` (target ``tr{S}/p``)."""
    return 1.0 / _positive_denominator(
        1.0 - k / p + k * np.asarray(tr_s2) / np.asarray(tr_s) ** 2, "HS"
    )


def qla_rho(tr_s, tr_sinv, tr_sinv2, p, k):
    """QL-optimal weight for the fixed target ``(tr{S}/p) I``."""
    tr_s = np.asarray(tr_s)
    den = (k * p + p**2) - (2.0 / p**2) * (
        k * p * np.asarray(tr_sinv) * tr_s - 0.5 * k * tr_s**2 * np.asarray(tr_sinv2)
    )
    return p**2 / _positive_denominator(den, "QLa")


def qlb_eta_rho(tr_sinv, tr_sinv2, p, k):
    """Jointly QL-optimal target scale and weight."""
    tr_sinv = np.asarray(tr_sinv)
    tr_sinv2 = np.asarray(tr_sinv2)
    eta = tr_sinv / tr_sinv2
    den = 1.0 + k / p - k * tr_sinv**2 / (p**2 * tr_sinv2)
    return eta, 1.0 / _positive_denominator(den, "QLb")


def hs_oracle(t: TraceSet, p: int, k: int) -> ShrinkageSolution:
    """HS shrinkage: ``eta = tr{S}/p`` and ``rho = [1 - K/p + K tr{S^2}/tr^2{S}]^-1``.

    The same pair minimises HS risk whether ``eta`` is fixed at ``tr{S}/p``
    or optimised jointly with ``rho``.
    """
    _check_inputs(t, p, k)
    eta = np.asarray(t.tr_s) / p
    return _from_eta_rho(Method.HS, eta, hs_rho(t.tr_s, t.tr_s2, p, k))


def qla_oracle(t: TraceSet, p: int, k: int) -> ShrinkageSolution:
    """QL shrinkage towards the fixed target ``(tr{S}/p) I``.

    ``rho = p^2 / [(Kp + p^2) - (2/p^2)(Kp tr{S^-1} tr{S} - (K/2) tr^2{S} tr{S^-2})]``

    Raises ``NonPositiveDenominatorError`` when the traces cannot come from a
    single positive definite matrix.
    """
    _check_inputs(t, p, k)
    eta = np.asarray(t.tr_s) / p
    rho = qla_rho(t.tr_s, t.tr_sinv, t.tr_sinv2, p, k)
    return _from_eta_rho(Method.QLA, eta, rho)


def qlb_oracle(t: TraceSet, p: int, k: int) -> ShrinkageSolution:
    """QL shrinkage with jointly optimised target scale.

    ``eta = tr{S^-1}/tr{S^-2}``,
    ``rho = [1 + K/p - K tr^2{S^-1} / (p^2 tr{S^-2})]^-1``.
    """
    _check_inputs(t, p, k)
    eta, rho = qlb_eta_rho(t.tr_sinv, t.tr_sinv2, p, k)
    return _from_eta_rho(Method.QLB, eta, rho)


def apply_affine(s_hat: HermitianMatrix, sol: ShrinkageSolution) -> HermitianMatrix:
    """``alpha * S_hat + beta * I``."""
    return HermitianMatrix(affine(s_hat.entries, sol.alpha, sol.beta))


def affine(a, alpha, beta):
    """``alpha * a + beta * I`` for a stack of matrices and broadcastable coefficients."""
    a = np.asarray(a)
    p = a.shape[-1]
    alpha = np.asarray(alpha, dtype=float)[..., None, None]
    beta = np.asarray(beta, dtype=float)[..., None, None]
    return alpha * a + beta * np.eye(p)
