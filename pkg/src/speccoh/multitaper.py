"""Sine-taper multitaper estimation of spectral matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadCountError, FrequencyOutOfRangeError, LengthMismatchError
from .hermitian import HermitianMatrix, hermitize


@dataclass(frozen=True, eq=False)
class TaperSet:
    """``k`` orthonormal data tapers of length ``n``, stored as a ``(k, n)`` array."""

    weights: np.ndarray

    @property
    def k(self) -> int:
        return self.weights.shape[0]

    @property
    def n(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True, eq=False)
class EigenCoefficients:
    """Tapered Fourier transforms at one frequency; ``j`` has shape ``(p, k)``."""

    freq: float
    j: np.ndarray

    @property
    def p(self) -> int:
        return self.j.shape[0]

    @property
    def k(self) -> int:
        return self.j.shape[1]


def sine_tapers(n: int, k: int) -> TaperSet:
    """The first ``k`` sine tapers of length ``n``.

    ``h[k, t] = sqrt(2/(n+1)) * sin((k+1) pi (t+1) / (n+1))``, t = 0..n-1.
    """
    if k <= 0 or k > n:
        raise BadCountError(f"taper count must satisfy 1 <= k <= n, got k={k}, n={n}")
    t = np.arange(1, n + 1)
    kk = np.arange(1, k + 1)[:, None]
    w = np.sqrt(2.0 / (n + 1)) * np.sin(kk * np.pi * t / (n + 1))
    w.setflags(write=False)
    return TaperSet(w)


def bandwidth(k: int, n: int, dt: float) -> float:
    """Spectral-window bandwidth ``(k+1)/((n+1) dt)`` of ``k`` sine tapers."""
    return (k + 1) / ((n + 1) * dt)


def in_valid_band(freq: float, k: int, n: int, dt: float) -> bool:
    """True when ``B/2 < |freq| < f_N - B/2``.

    Inside this band the eigencoefficients are (to a good approximation)
    independent complex Gaussian vectors; outside it they are not.
    """
    half_b = 0.5 * bandwidth(k, n, dt)
    nyquist = 0.5 / dt
    return half_b < abs(freq) < nyquist - half_b


def eigencoefficients(x, tapers: TaperSet, freq: float, dt: float) -> EigenCoefficients:
    """Tapered Fourier transforms of a real ``(p, n)`` series at one frequency.

    Evaluated by direct summation so that ``freq`` need not sit on an FFT bin:
    ``J[:, k] = sqrt(dt) * sum_t h[k, t] x[:, t] exp(-2 pi i f t dt)``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != tapers.n:
        raise LengthMismatchError(
            f"series has {x.shape[1]} samples but tapers have length {tapers.n}"
        )
    nyquist = 0.5 / dt
    if abs(freq) > nyquist * (1 + 1e-12):
        raise FrequencyOutOfRangeError(
            f"|f|={abs(freq)} exceeds the Nyquist frequency {nyquist}"
        )
    t = np.arange(tapers.n)
    phase = np.exp(-2j * np.pi * freq * t * dt)
    j = np.sqrt(dt) * (x @ (tapers.weights * phase).T)
    return EigenCoefficients(float(freq), j)


def spectral_matrix(j: EigenCoefficients) -> HermitianMatrix:
    """Multitaper spectral matrix estimate ``J J^H / K``."""
    return HermitianMatrix(gram(j.j))


def gram(j):
    """``J J^H / K`` for a stack of ``(..., p, K)`` eigencoefficient arrays."""
    j = np.asarray(j)
    k = j.shape[-1]
    return hermitize(j @ np.conj(np.swapaxes(j, -1, -2)) / k)


def multitaper_matrices(x, k: int, freqs, dt: float):
    """Spectral matrix estimates of a ``(p, n)`` series over a frequency grid.

    Returns a ``(len(freqs), p, p)`` complex array.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    tapers = sine_tapers(x.shape[1], k)
    return np.stack(
        [gram(eigencoefficients(x, tapers, f, dt).j) for f in np.atleast_1d(freqs)]
    )
