import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import pd_matrices
from speccoh import (
    DegenerateTracesError,
    HermitianMatrix,
    InsufficientTapersError,
    Method,
    NotPositiveDefiniteError,
    Provenance,
    ShrinkageSolution,
    TraceSet,
    apply_precision_affine,
    hsp_oracle,
    qlp_oracle,
    trace_powers,
)

DIAG12 = np.diag([1.0, 2.0])


def traces(s):
    return trace_powers(HermitianMatrix(s))


def test_hsp_diag12():
    # m = 2, c3 = 4/6, r = 1.25/2.25; D = c3 p m^2 r + c3 p m - K/m
    sol = hsp_oracle(traces(DIAG12), 2, 4)
    c3, r = 4 / 6, 1.25 / 2.25
    d = c3 * 2 * 4 * r + c3 * 2 * 2 - 2
    assert sol.alpha == pytest.approx((2 * r - 1) / d, rel=1e-14)
    assert sol.beta == pytest.approx(c3 * 1.5 * (r + 2) / d, rel=1e-14)
    assert sol.alpha == pytest.approx(0.030613, abs=1e-6)
    assert sol.beta == pytest.approx(0.70408, abs=1e-5)
    assert sol.method is Method.HSP


def test_qlp_diag12():
    sol = qlp_oracle(traces(DIAG12), 2, 4)
    c0 = 16 / 3
    d = c0 * 2 * 5 / 9 - 2
    assert d == pytest.approx(3.92593, abs=1e-5)
    assert sol.alpha == pytest.approx((10 / 9 - 1) / d, rel=1e-14)
    assert sol.beta == pytest.approx(2 * (c0 - 2) / (d * 3), rel=1e-14)
    assert sol.alpha == pytest.approx(0.028302, abs=1e-6)
    assert sol.beta == pytest.approx(0.566038, abs=1e-6)


def test_qlp_diag114():
    # tr = 6, tr2 = 18, r = 0.5; m = 3, c0 = 36/8; D = 4.5 * 1.5 - 2
    sol = qlp_oracle(traces(np.diag([1.0, 1.0, 4.0])), 3, 6)
    d = 4.5 * 1.5 - 2
    assert sol.alpha == pytest.approx(0.5 / d, rel=1e-14)
    assert sol.beta == pytest.approx(3 * (4.5 - 2) / (d * 6), rel=1e-14)


@pytest.mark.parametrize("oracle", [hsp_oracle, qlp_oracle])
@pytest.mark.parametrize("c,p", [(1.0, 2), (0.25, 5), (3.0, 10), (1e3, 4)])
def test_scaled_identity_exact(oracle, c, p):
    sol = oracle(traces(c * np.eye(p)), p, p + 3)
    assert sol.alpha == 0.0
    assert sol.beta == pytest.approx(1 / c, rel=1e-12)
    assert not sol.clamped


@pytest.mark.parametrize("oracle", [hsp_oracle, qlp_oracle])
@pytest.mark.parametrize("k", [3, 2, 1])
def test_insufficient_tapers(oracle, k):
    with pytest.raises(InsufficientTapersError):
        oracle(traces(DIAG12), 2, k)


@pytest.mark.parametrize("oracle", [hsp_oracle, qlp_oracle])
def test_degenerate(oracle):
    with pytest.raises(DegenerateTracesError):
        oracle(TraceSet(0.0, 1.0, 1.0, 1.0), 2, 5)


@pytest.mark.parametrize("oracle", [hsp_oracle, qlp_oracle])
def test_oracle_cauchy_schwarz_violation_is_an_error(oracle):
    # tr2 / tr^2 = 0.49 < 1/p: impossible for a real matrix, yet D > 0 at K = 50
    with pytest.raises(DegenerateTracesError):
        oracle(TraceSet(4.0, 7.84, 4.0, 7.84), 2, 50)


def test_estimated_negative_sphericity_is_clamped():
    t = TraceSet(4.0, 7.84, 4.0, 7.84, provenance=Provenance.ESTIMATED)
    hsp = hsp_oracle(t, 2, 50)
    assert hsp.alpha == 0.0 and hsp.clamped
    assert hsp.beta == pytest.approx(4.0 / 2)
    qlp = qlp_oracle(t, 2, 50)
    assert qlp.alpha == 0.0 and qlp.clamped
    assert qlp.beta == pytest.approx(4.0 / 7.84)


def test_edge_beta_minimises_risk_on_alpha_zero():
    # on alpha = 0 the HS risk is ||beta I - S^-1||^2, minimised at tr{S^-1}/p,
    # and the QL risk is tr{(beta S - I)^2}, minimised at tr{S}/tr{S^2}
    s = np.diag([1.0, 3.0, 5.0])
    t = traces(s)
    betas = np.linspace(0.01, 2, 20001)
    hs = [np.sum((b - 1 / np.diag(s)) ** 2) for b in betas]
    ql = [np.sum((b * np.diag(s) - 1) ** 2) for b in betas]
    assert betas[np.argmin(hs)] == pytest.approx(t.tr_sinv / 3, abs=1e-4)
    assert betas[np.argmin(ql)] == pytest.approx(t.tr_s / t.tr_s2, abs=1e-4)


def test_apply_precision_affine_examples():
    sol = ShrinkageSolution(Method.HSP, 0.0, 2.0)
    np.testing.assert_array_equal(
        apply_precision_affine(HermitianMatrix(np.diag([5.0, 7.0])), sol).entries, 2 * np.eye(2)
    )
    sol = ShrinkageSolution(Method.HSP, 1.0, 0.0)
    np.testing.assert_allclose(
        apply_precision_affine(HermitianMatrix(np.diag([2.0, 4.0])), sol).entries, np.diag([0.5, 0.25])
    )
    sol = ShrinkageSolution(Method.QLP, 0.5, 0.1)
    np.testing.assert_allclose(
        apply_precision_affine(HermitianMatrix(DIAG12), sol).entries, np.diag([0.6, 0.35])
    )


def test_apply_precision_affine_singular():
    with pytest.raises(NotPositiveDefiniteError):
        apply_precision_affine(HermitianMatrix(np.diag([1.0, 0.0])), ShrinkageSolution(Method.HSP, 1.0, 0.0))


@settings(max_examples=80, deadline=None)
@given(pd_matrices(max_p=6), st.integers(2, 12))
def test_sphericity_link(s, extra):
    p = len(s)
    k = p + extra
    t = traces(s)
    spherical = np.allclose(s, s[0, 0] * np.eye(p), rtol=1e-9)
    for oracle in (hsp_oracle, qlp_oracle):
        sol = oracle(t, p, k)
        if spherical:
            assert sol.alpha == pytest.approx(0, abs=1e-9)
        else:
            assert sol.alpha > 0
        assert sol.beta > 0
        assert not sol.clamped


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.floats(0.01, 100), st.integers(2, 20))
def test_scaled_identity_property(p, c, extra):
    t = traces(c * np.eye(p))
    for oracle in (hsp_oracle, qlp_oracle):
        sol = oracle(t, p, p + extra)
        assert sol.alpha == pytest.approx(0, abs=1e-12)
        assert sol.beta == pytest.approx(1 / c, rel=1e-12)


def test_vectorised_estimated_traces(rng):
    from speccoh.traces import estimate_from_arrays
    from speccoh.sampling import draw_spectral_batch

    s_hat = draw_spectral_batch(np.diag([1.0, 2.0, 3.0]), 6, 50, seed=3)
    est = estimate_from_arrays(s_hat, 6)
    for oracle in (hsp_oracle, qlp_oracle):
        vec = oracle(est, 3, 6)
        for i in (0, 17, 49):
            one = oracle(TraceSet(*[np.asarray(v)[i] for v in est.as_tuple()],
                                  provenance=Provenance.ESTIMATED), 3, 6)
            assert vec.alpha[i] == pytest.approx(one.alpha, rel=1e-14)
            assert vec.beta[i] == pytest.approx(one.beta, rel=1e-14)
            assert bool(vec.clamped[i]) == one.clamped
