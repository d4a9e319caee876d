import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speccoh import (
    BadCountError,
    EigenCoefficients,
    FrequencyOutOfRangeError,
    LengthMismatchError,
    TaperSet,
    bandwidth,
    eigencoefficients,
    in_valid_band,
    sine_tapers,
    spectral_matrix,
)
from speccoh.multitaper import gram, multitaper_matrices


def test_single_taper_hand_values():
    w = sine_tapers(3, 1).weights
    # sqrt(2/4) * sin(pi t / 4) for t = 1, 2, 3
    np.testing.assert_allclose(w[0], [0.5, np.sqrt(0.5), 0.5], atol=1e-15)


def test_two_tapers_orthonormal():
    w = sine_tapers(3, 2).weights
    assert w[0] @ w[1] == pytest.approx(0, abs=1e-15)
    assert w[0] @ w[0] == pytest.approx(1)
    assert w[1] @ w[1] == pytest.approx(1)


@pytest.mark.parametrize("n,k", [(2, 3), (5, 0), (5, -1)])
def test_bad_count(n, k):
    with pytest.raises(BadCountError):
        sine_tapers(n, k)


def test_orthonormal_grid():
    for n in (1, 2, 7, 64, 255, 512):
        for k in sorted({1, min(2, n), n // 3 or 1, n}):
            w = sine_tapers(n, k).weights
            assert np.abs(w @ w.T - np.eye(k)).max() < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 512).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_orthonormal_property(nk):
    n, k = nk
    w = sine_tapers(n, k).weights
    assert w.shape == (k, n)
    assert np.abs(w @ w.T - np.eye(k)).max() < 1e-10


def test_zero_series_gives_zero_coefficients():
    j = eigencoefficients(np.zeros((2, 16)), sine_tapers(16, 3), 0.2, 1.0)
    assert np.all(j.j == 0)
    assert (j.p, j.k) == (2, 3)


def test_degenerate_single_taper_direct_sum():
    tapers = TaperSet(np.array([[1.0, 0.0]]))
    j = eigencoefficients(np.array([[3.0, 7.0]]), tapers, 0.0, 1.0)
    np.testing.assert_allclose(j.j, [[3.0]])


def test_definition_by_brute_force(rng):
    x = rng.standard_normal((2, 40))
    dt, f = 0.05, 3.3
    tapers = sine_tapers(40, 4)
    j = eigencoefficients(x, tapers, f, dt).j
    for kk in range(4):
        for ch in range(2):
            direct = np.sqrt(dt) * sum(
                tapers.weights[kk, t] * x[ch, t] * np.exp(-2j * np.pi * f * t * dt)
                for t in range(40)
            )
            assert j[ch, kk] == pytest.approx(direct, rel=1e-12)


def test_conjugate_symmetry(rng):
    x = rng.standard_normal((3, 50))
    tapers = sine_tapers(50, 5)
    jp = eigencoefficients(x, tapers, 1.7, 0.1).j
    jm = eigencoefficients(x, tapers, -1.7, 0.1).j
    np.testing.assert_allclose(jm, np.conj(jp), atol=1e-13)


def test_length_mismatch():
    with pytest.raises(LengthMismatchError):
        eigencoefficients(np.zeros((2, 10)), sine_tapers(11, 2), 0.1, 1.0)


def test_frequency_out_of_range():
    with pytest.raises(FrequencyOutOfRangeError):
        eigencoefficients(np.zeros((1, 10)), sine_tapers(10, 2), 0.51, 1.0)
    eigencoefficients(np.zeros((1, 10)), sine_tapers(10, 2), 0.5, 1.0)


def test_spectral_matrix_examples():
    s = spectral_matrix(EigenCoefficients(0.0, np.array([[1.0, 1j]])))
    np.testing.assert_allclose(s.entries, [[1.0]])
    s = spectral_matrix(EigenCoefficients(0.0, np.array([[2.0, 0.0]])))
    np.testing.assert_allclose(s.entries, [[2.0]])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_spectral_matrix_psd_and_rank(p, k, seed):
    r = np.random.default_rng(seed)
    j = r.standard_normal((p, k)) + 1j * r.standard_normal((p, k))
    s = spectral_matrix(EigenCoefficients(0.0, j)).entries
    lam = np.linalg.eigvalsh(s)
    assert lam.min() >= -1e-12
    assert np.linalg.matrix_rank(s, tol=1e-10) <= min(p, k)


def test_bandwidth_examples():
    assert bandwidth(12, 1024, 0.05) == pytest.approx(13 / (1025 * 0.05))
    assert bandwidth(12, 1024, 0.05) == pytest.approx(0.25366, abs=1e-5)
    assert bandwidth(1, 1, 1) == 1.0
    assert bandwidth(14, 1024, 0.05) == pytest.approx(0.29268, abs=1e-5)


def test_valid_band():
    b = bandwidth(12, 1024, 0.05)
    assert not in_valid_band(b / 2 * 0.99, 12, 1024, 0.05)
    assert in_valid_band(0.55, 12, 1024, 0.05)
    assert not in_valid_band(10 - b / 2 * 0.99, 12, 1024, 0.05)
    assert in_valid_band(-0.55, 12, 1024, 0.05)


def test_white_noise_parseval():
    # unit-variance white noise: the average of S11 over the whole band is
    # var * dt * 2 * f_N = var = 1 (two-sided density on [-f_N, f_N] has height dt)
    r = np.random.default_rng(5)
    n, dt, k = 256, 0.5, 5
    x = r.standard_normal((1, n))
    freqs = np.linspace(-1 / (2 * dt), 1 / (2 * dt), 401)
    s11 = np.real(multitaper_matrices(x, k, freqs, dt)[:, 0, 0])
    avg = s11.mean() * 2 * (0.5 / dt)
    # the band average is a quadratic form with mean var; its sd is ~ 1/sqrt(n)
    assert avg == pytest.approx(1.0, abs=4 / np.sqrt(n))


def test_gram_matches_spectral_matrix(rng):
    j = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    np.testing.assert_allclose(gram(j), spectral_matrix(EigenCoefficients(0.0, j)).entries)
