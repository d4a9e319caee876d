"""Data-driven estimates of the trace functionals used by the shrinkage rules.

``tr{S}``   <- ``tr{S_hat}``                        (unbiased)
``tr{S^2}`` <- ``tr{S_hat^2} - tr^2{S_hat}/K``      (mean ``(1 - 1/K^2) tr{S^2}``)
``tr{S^-1}``<- ``(1 - p/K) tr{S_hat^-1}``           (unbiased for K > p)
``tr{S^-2}``<- ``(1 - p/K)^2 tr{S_hat^-2}``         (asymptotically unbiased)

The exactly unbiased two-term estimator of ``tr{S^-2}`` has a much larger
variance and is exposed only for comparison in :func:`bias_check`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientTapersError, PreconditionError
from .hermitian import HermitianMatrix, Provenance, TraceSet, trace_power_arrays, trace_powers
from .sampling import draw_spectral_batch


def _check_k(p, k):
    if k <= p + 1:
        raise InsufficientTapersError(
            f"inverse-trace estimators need K > p + 1, got K={k}, p={p}"
        )


def estimate_from_arrays(s_hat, k: int) -> TraceSet:
    """Trace estimates for a single matrix or a ``(..., p, p)`` stack."""
    s_hat = np.asarray(s_hat)
    p = s_hat.shape[-1]
    _check_k(p, k)
    tr, tr2, tri, tri2 = trace_power_arrays(s_hat)
    shrink = 1.0 - p / k
    return TraceSet(
        tr,
        tr2 - np.asarray(tr) ** 2 / k,
        shrink * tri,
        shrink**2 * tri2,
        provenance=Provenance.ESTIMATED,
    )


def estimate_traces(s_hat: HermitianMatrix, k: int) -> TraceSet:
    """Estimate ``tr{S}, tr{S^2}, tr{S^-1}, tr{S^-2}`` from a multitaper estimate."""
    return estimate_from_arrays(s_hat.entries, k)


def unbiased_tr_sinv2(tr_hat_inv, tr_hat_inv2, p: int, k: int):
    """The exactly unbiased (but high-variance) two-term estimator of ``tr{S^-2}``.

    ``(1-p/K)^2 tr{S_hat^-2} - (1/K)(1-p/K) tr^2{S_hat^-1}``; may be negative.
    """
    shrink = 1.0 - p / k
    return shrink**2 * np.asarray(tr_hat_inv2) - shrink * np.asarray(tr_hat_inv) ** 2 / k


@dataclass(frozen=True)
class BiasRow:
    name: str
    truth: float
    mc_mean: float
    se: float
    expected_mean: float
    variance: float

    @property
    def z(self) -> float:
        return (self.mc_mean - self.expected_mean) / self.se if self.se > 0 else 0.0


@dataclass(frozen=True)
class BiasReport:
    p: int
    k: int
    m: int
    seed: int
    rows: tuple
    two_term_variance: float
    one_term_variance: float
    two_term_negative_fraction: float

    def row(self, name: str) -> BiasRow:
        return next(r for r in self.rows if r.name == name)


def bias_check(s0, k: int, m: int, seed: int) -> BiasReport:
    """Monte-Carlo check of the trace estimators at one true spectral matrix.

    ``expected_mean`` is the known mean of each estimator: the truth for
    ``tr_s`` and ``tr_sinv``, ``(1 - 1/K^2) tr{S^2}`` for ``tr_s2``, and no
    closed form (truth is reported) for the one-term ``tr_sinv2``. The
    variance of the two-term ``tr{S^-2}`` estimator is reported alongside the
    adopted one-term one; negative two-term values are counted, not truncated.
    """
    if m < 100:
        raise PreconditionError(f"bias_check needs m >= 100 replicates, got {m}")
    if not isinstance(s0, HermitianMatrix):
        s0 = HermitianMatrix(s0)
    p = s0.dim
    _check_k(p, k)
    truth = trace_powers(s0)
    s_hat = draw_spectral_batch(s0, k, m, seed)
    est = estimate_from_arrays(s_hat, k)
    _, _, tri, tri2 = trace_power_arrays(s_hat)
    two_term = unbiased_tr_sinv2(tri, tri2, p, k)

    expected = {
        "tr_s": truth.tr_s,
        "tr_s2": (1.0 - 1.0 / k**2) * truth.tr_s2,
        "tr_sinv": truth.tr_sinv,
        "tr_sinv2": truth.tr_sinv2,
    }
    rows = []
    for name, values, true_value in zip(
        ("tr_s", "tr_s2", "tr_sinv", "tr_sinv2"), est.as_tuple(), truth.as_tuple()
    ):
        values = np.asarray(values)
        rows.append(
            BiasRow(
                name,
                float(true_value),
                float(values.mean()),
                float(values.std(ddof=1) / np.sqrt(m)),
                float(expected[name]),
                float(values.var(ddof=1)),
            )
        )
    rows.append(
        BiasRow(
            "tr_sinv2_two_term",
            truth.tr_sinv2,
            float(two_term.mean()),
            float(two_term.std(ddof=1) / np.sqrt(m)),
            truth.tr_sinv2,
            float(two_term.var(ddof=1)),
        )
    )
    return BiasReport(
        p,
        k,
        m,
        seed,
        tuple(rows),
        two_term_variance=float(two_term.var(ddof=1)),
        one_term_variance=float(np.var(est.tr_sinv2, ddof=1)),
        two_term_negative_fraction=float(np.mean(two_term < 0)),
    )
