"""Hermitian matrix value type and the linear-algebra kernels built on it.

The array-level kernels (``hermitize``, ``inv_pd``, ``trace_power_arrays``)
operate on stacks of matrices with shape ``(..., p, p)`` so the Monte-Carlo
driver can process all replicates of one frequency in a single call. The
``HermitianMatrix`` wrappers are the per-matrix public surface.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTracesError,
    NonSquareError,
    NotPositiveDefiniteError,
    TooAsymmetricError,
)

#: relative asymmetry accepted (and removed) by :func:`make_hermitian`
ASYMMETRY_TOL = 1e-9
#: relative asymmetry tolerated by the ``HermitianMatrix`` constructor itself
INVARIANT_TOL = 1e-12


def hermitize(a):
    """Return the Hermitian part ``(a + a^H) / 2`` of a stack of matrices."""
    a = np.asarray(a)
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def _relative_asymmetry(a: np.ndarray) -> float:
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - np.conj(a.T))) / scale)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A ``p x p`` complex Hermitian matrix.

    Instances are immutable: ``entries`` is a read-only ``complex128`` array.
    Use :func:`make_hermitian` to build one from slightly asymmetric input.
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NonSquareError(f"expected a square matrix, got shape {a.shape}")
        if _relative_asymmetry(a) > INVARIANT_TOL:
            raise TooAsymmetricError("entries are not Hermitian")
        a = hermitize(a)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries.copy()
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim}, entries={self.entries!r})"

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def make_hermitian(raw, tol: float = ASYMMETRY_TOL) -> HermitianMatrix:
    """Build a :class:`HermitianMatrix` from nearly-Hermitian input.

    The Hermitian part ``(raw + raw^H)/2`` is returned when the relative
    asymmetry ``max|raw - raw^H| / max|raw|`` does not exceed ``tol``; this
    also zeroes tiny imaginary parts on the diagonal.

    Raises
    ------
    NonSquareError
        If ``raw`` is not a square 2-d array.
    TooAsymmetricError
        If the asymmetry is above ``tol``, which usually means corrupted input.
    """
    a = np.array(raw, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {a.shape}")
    asym = _relative_asymmetry(a)
    if asym > tol:
        raise TooAsymmetricError(
            f"relative asymmetry {asym:.3g} exceeds tolerance {tol:.1g}"
        )
    return HermitianMatrix(hermitize(a))


def inv_pd(a):
    """Invert a stack of Hermitian positive definite matrices.

    Uses a Cholesky factorisation ``a = L L^H`` so that ``a^{-1} = L^{-H} L^{-1}``
    is Hermitian by construction; the result is re-symmetrised anyway.
    There is deliberately no condition-number cutoff.
    """
    a = np.asarray(a, dtype=np.complex128)
    if not np.all(np.isfinite(a)):
        raise NotPositiveDefiniteError("matrix has non-finite entries")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("Cholesky factorisation failed") from exc
    chol_inv = np.linalg.inv(chol)
    return hermitize(np.conj(np.swapaxes(chol_inv, -1, -2)) @ chol_inv)


def invert(s: HermitianMatrix) -> HermitianMatrix:
    """Inverse of a positive definite Hermitian matrix.

    Raises ``NotPositiveDefiniteError`` when the factorisation fails, e.g.
    for a multitaper estimate built from fewer tapers than channels.
    """
    return HermitianMatrix(inv_pd(s.entries))


def trace_power_arrays(a):
    """``tr{A}, tr{A^2}, tr{A^-1}, tr{A^-2}`` for a stack of PD matrices.

    Computed from the eigenvalues, so each output has the stack's leading
    shape (a plain float for a single matrix).
    """
    a = np.asarray(a, dtype=np.complex128)
    if not np.all(np.isfinite(a)):
        raise NotPositiveDefiniteError("matrix has non-finite entries")
    lam = np.linalg.eigvalsh(a)
    if np.any(lam <= 0.0):
        raise NotPositiveDefiniteError(
            f"smallest eigenvalue {lam.min():.3g} is not positive"
        )
    inv = 1.0 / lam
    out = (lam.sum(-1), (lam**2).sum(-1), inv.sum(-1), (inv**2).sum(-1))
    if lam.ndim == 1:
        return tuple(float(x) for x in out)
    return out


class Provenance(enum.Enum):
    ORACLE = "oracle"
    ESTIMATED = "estimated"


@dataclass(frozen=True)
class TraceSet:
    """The trace functionals ``tr{S}, tr{S^2}, tr{S^-1}, tr{S^-2}``.

    Fields are floats, or equal-shape arrays when a batch of replicates is
    processed at once. Oracle trace sets are checked against the
    Cauchy-Schwarz bounds ``p tr{S^2} >= tr{S}^2`` and
    ``p tr{S^-2} >= tr{S^-1}^2`` by :meth:`check_cauchy_schwarz`.
    """

    tr_s: float
    tr_s2: float
    tr_sinv: float
    tr_sinv2: float
    provenance: Provenance = Provenance.ORACLE

    def as_tuple(self):
        return self.tr_s, self.tr_s2, self.tr_sinv, self.tr_sinv2

    def check_positive(self):
        vals = [np.asarray(v, dtype=float) for v in self.as_tuple()]
        if not all(np.all(np.isfinite(v)) and np.all(v > 0) for v in vals):
            raise DegenerateTracesError("trace values must be finite and positive")

    def check_cauchy_schwarz(self, p: int, rtol: float = 1e-10) -> bool:
        s = p * np.asarray(self.tr_s2) - np.asarray(self.tr_s) ** 2
        t = p * np.asarray(self.tr_sinv2) - np.asarray(self.tr_sinv) ** 2
        ok_s = np.all(s >= -rtol * p * np.asarray(self.tr_s2))
        ok_t = np.all(t >= -rtol * p * np.asarray(self.tr_sinv2))
        return bool(ok_s and ok_t)


def trace_powers(s: HermitianMatrix) -> TraceSet:
    """Exact trace functionals of a positive definite matrix (oracle values)."""
    return TraceSet(*trace_power_arrays(s.entries), provenance=Provenance.ORACLE)


def identity(p: int) -> HermitianMatrix:
    return HermitianMatrix(np.eye(p, dtype=np.complex128))
