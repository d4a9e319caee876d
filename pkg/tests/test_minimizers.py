"""Closed-form shrinkage coefficients against the empirical risk minimiser.

With many replicates, the argmin of the empirical risk should sit within a
few batch-means standard errors of the closed form. Differences that are
larger than the sampling noise would point to an error in a formula.
"""

import numpy as np
import pytest

from oracles import hs_risk, hsp_risk, ql_risk, qlp_risk, random_pd, rho_grid_argmin, wishart_draws
from speccoh import HermitianMatrix, hs_oracle, hsp_oracle, qla_oracle, qlb_oracle, qlp_oracle, trace_powers

RULES = [
    ("HS", hs_oracle, hs_risk, "rho"),
    ("QLa", qla_oracle, ql_risk, "rho"),
    ("QLb", qlb_oracle, ql_risk, "ab"),
    ("HSP", hsp_oracle, hsp_risk, "ab"),
    ("QLP", qlp_oracle, qlp_risk, "ab"),
]


def batch_z(risk, sol, kind, n_batches=20):
    if kind == "rho":
        def argmin(r):
            return np.array([rho_grid_argmin(r, sol.eta, step=1e-4)])
        truth = np.array([sol.rho])
    else:
        def argmin(r):
            return r.stationary_point()
        truth = np.array([sol.alpha, sol.beta])
    full = argmin(risk)
    parts = np.array([argmin(b) for b in risk.batches(n_batches)])
    se = parts.std(axis=0, ddof=1) / np.sqrt(n_batches)
    return (full - truth) / se


@pytest.mark.parametrize("case", range(6))
@pytest.mark.parametrize("name,oracle,make_risk,kind", RULES, ids=[r[0] for r in RULES])
def test_closed_form_matches_large_sample_argmin(case, name, oracle, make_risk, kind):
    rng = np.random.default_rng(500 + case)
    p = (2, 3, 4)[case % 3]
    k = p + 3
    s = random_pd(p, rng)
    s_hat = wishart_draws(s, k, 40_000, rng)
    sol = oracle(trace_powers(HermitianMatrix(s)), p, k)
    z = batch_z(make_risk(s, s_hat), sol, kind)
    assert np.all(np.abs(z) <= 4), z
