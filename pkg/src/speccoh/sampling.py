"""Seeded complex-Gaussian sampling of eigencoefficients.

Seeding contract: replicate ``m`` at frequency index ``l`` draws from a
generator seeded by ``SeedSequence([seed, l, m])``. The child stream is a
pure function of ``(seed, l, m)``, so results do not depend on how the
replicates are scheduled, and the first replicates of a run with ``M = 1``
and ``M = 2`` coincide.
"""

from __future__ import annotations

import numpy as np

from .errors import NotPositiveDefiniteError
from .hermitian import HermitianMatrix
from .multitaper import EigenCoefficients, gram


def child_rng(seed: int, l: int, m: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(l), int(m)]))


def standard_complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Complex Gaussian with ``E[z z^H] = I``: real and imaginary parts have variance 1/2."""
    re, im = rng.standard_normal((2, *shape))
    return (re + 1j * im) / np.sqrt(2.0)


def cholesky_factor(s0) -> np.ndarray:
    s0 = np.asarray(s0, dtype=np.complex128)
    try:
        return np.linalg.cholesky(s0)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("true spectral matrix is not positive definite") from exc


def draw_eigencoefficients(
    s0: HermitianMatrix, k: int, rng: np.random.Generator, freq: float = float("nan")
) -> EigenCoefficients:
    """``K`` independent columns ``J_k = L z_k`` with ``L L^H = s0``.

    ``K * gram(J)`` is then complex Wishart with ``K`` degrees of freedom and
    scale matrix ``s0``.
    """
    chol = cholesky_factor(s0.entries)
    z = standard_complex_normal(rng, (s0.dim, k))
    return EigenCoefficients(freq, chol @ z)


def draw_spectral_batch(s0, k: int, m: int, seed: int, l: int = 0) -> np.ndarray:
    """``m`` multitaper estimates ``J J^H / K`` drawn under the seeding contract.

    ``s0`` may be a :class:`HermitianMatrix` or a ``(p, p)`` array. Returns an
    ``(m, p, p)`` complex array.
    """
    s0 = np.asarray(s0.entries if isinstance(s0, HermitianMatrix) else s0)
    chol = cholesky_factor(s0)
    p = s0.shape[0]
    z = np.stack([standard_complex_normal(child_rng(seed, l, i), (p, k)) for i in range(m)])
    return gram(chol @ z)
