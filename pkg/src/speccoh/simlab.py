"""Synthetic spectral models and the Monte-Carlo PRISE driver.

Each replicate draws ``K`` eigencoefficient vectors per frequency directly
from ``N_p^C(0, S0(f))``, so ``K S_hat(f)`` is complex Wishart. Frequencies
are sampled independently of one another.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    InsufficientTapersError,
    NotPositiveDefiniteError,
    PreconditionError,
)
from .hermitian import HermitianMatrix, TraceSet, inv_pd, trace_power_arrays
from .pcoh import PriseReport, pcoh_arrays, prise, squared_error_arrays
from .sampling import draw_eigencoefficients, draw_spectral_batch  # noqa: F401
from .shrink_precision import hsp_oracle, qlp_oracle
from .shrink_spectral import affine, hs_oracle, qla_oracle, qlb_oracle
from .traces import estimate_from_arrays

RAW = "Raw"
SPECTRAL_METHODS = {"HS": hs_oracle, "QLa": qla_oracle, "QLb": qlb_oracle}
PRECISION_METHODS = {"HSP": hsp_oracle, "QLP": qlp_oracle}
ORACLE_METHODS = ("HS", "QLa", "QLb", "HSP", "QLP")
EST_METHODS = ("QLa-est", "QLb-est", "QLP-est")
ALL_METHODS = (RAW,) + ORACLE_METHODS + EST_METHODS


def default_grid(start=0.55, stop=4.05, step=0.1) -> np.ndarray:
    """Inclusive frequency grid, rounded to avoid accumulated float drift."""
    n = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(n), 10)


# ---------------------------------------------------------------------------
# spectral models


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """True spectral matrices ``S0(f)`` on an increasing frequency grid.

    ``matrices`` has shape ``(len(grid), p, p)``. ``target_pcoh`` holds the
    partial coherences built into the model, shape ``(len(grid), p, p)``.
    """

    label: str
    grid: np.ndarray
    matrices: np.ndarray
    target_pcoh: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.matrices.shape[-1]

    def matrix(self, l: int) -> HermitianMatrix:
        return HermitianMatrix(self.matrices[l])

    def scaled(self, c: float) -> "SpectralModel":
        return SpectralModel(
            f"{self.label}*{c:g}", self.grid, c * self.matrices, self.target_pcoh, self.params
        )


def band_pattern(p: int, band: int = 1) -> np.ndarray:
    """Symmetric 0/1 matrix with ones on the first ``band`` off-diagonals."""
    j, k = np.indices((p, p))
    return ((np.abs(j - k) >= 1) & (np.abs(j - k) <= band)).astype(float)


def kappa_limit(pattern: np.ndarray) -> float:
    """Largest ``kappa`` keeping ``I + kappa * pattern`` positive definite."""
    lam_min = np.linalg.eigvalsh(pattern)[0]
    return np.inf if lam_min >= 0 else -1.0 / lam_min


def kappa_for_pcoh(pcoh: float) -> float:
    """Coupling giving squared partial coherence ``pcoh`` for a unit-diagonal precision."""
    return float(np.sqrt(pcoh))


def _gains(p, params):
    gains = params.get("gains")
    if gains is None:
        ratio = float(params.get("gain_ratio", 1.0))
        return ratio ** (np.arange(p) / max(p - 1, 1))
    gains = np.asarray(gains, dtype=float)
    if gains.shape != (p,) or np.any(gains <= 0):
        raise PreconditionError("gains must be p positive numbers")
    return gains


def spike_profile(grid, spikes) -> np.ndarray:
    """Sum of Gaussian bumps ``height * exp(-(f - center)^2 / (2 width^2))``."""
    out = np.zeros(np.shape(grid))
    for spike in spikes:
        out += spike["height"] * np.exp(
            -0.5 * ((np.asarray(grid) - spike["center"]) / spike["width"]) ** 2
        )
    return out


def pair_pattern(p: int, pairs) -> np.ndarray:
    out = np.zeros((p, p))
    for j, k in pairs:
        if not (0 <= j < p and 0 <= k < p and j != k):
            raise PreconditionError(f"pair {(j, k)} invalid for p={p}")
        out[j, k] = out[k, j] = 1.0
    return out


def _chain(channels):
    return [[a, b] for a, b in zip(channels[:-1], channels[1:])]


DEFAULT_DENSE = {
    "kappa": 0.5,
    "spikes": [
        {"center": 2.0, "height": 0.28, "width": 0.15},
        {"center": 3.25, "height": 0.28, "width": 0.15},
    ],
    "gain_ratio": 10.0,
}
DEFAULT_SPARSE = {"kappa": 0.6, "pair": [0, 1], "gain_ratio": 3.0}


def make_model(kind: str, params: dict | None = None, grid=None, p: int = 10) -> SpectralModel:
    """Build a synthetic spectral model on ``grid`` (default 0.55:0.1:4.05 Hz).

    Every non-identity model is defined through its precision matrix
    ``C0(f) = G (I + kappa B + s(f) T) G`` with ``S0(f) = C0(f)^-1``, where
    ``B`` and ``T`` are symmetric 0/1 patterns with zero diagonal and ``G`` is
    a diagonal of channel gains (``gains``, or ``gain_ratio`` for gains
    spaced geometrically from 1 to ``gain_ratio``). The gains leave partial
    coherence unchanged but spread the eigenvalues of ``S0``.

    kinds
        ``identity``: ``S0 = c I`` (param ``c``, default 1).
        ``dense``: ``B`` is the band pattern with ``band`` off-diagonals
        (default ``p - 1``, i.e. every pair) carrying a floor coupling
        ``kappa``; ``s(f)`` is a sum of Gaussian ``spikes`` (``center``,
        ``height``, ``width``; defaults at 2 and 3.25 Hz) acting on
        ``spike_pairs`` (default: the chain joining the last four channels).
        With no spikes every band pair has squared partial coherence
        ``kappa^2``.
        ``sparse``: a single coupled ``pair`` with constant ``kappa``.

    Raises ``NotPositiveDefiniteError`` when the couplings are too large for
    ``C0`` to be positive definite at some frequency.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise PreconditionError("grid must be a non-empty strictly increasing sequence")
    params = dict(params or {})
    p = int(params.pop("p", p))
    if p < 1:
        raise PreconditionError("p must be positive")

    if kind == "identity":
        c = float(params.get("c", 1.0))
        if not c > 0:
            raise NotPositiveDefiniteError("identity scale c must be positive")
        mats = np.broadcast_to(c * np.eye(p, dtype=np.complex128), (grid.size, p, p)).copy()
        target = np.broadcast_to(np.eye(p), (grid.size, p, p)).copy()
        return SpectralModel("identity", grid, mats, target, {"c": c, "p": p})

    if kind == "dense":
        params = {**DEFAULT_DENSE, **params}
        params.setdefault("band", p - 1)
        params.setdefault("spike_pairs", _chain(list(range(max(p - 4, 0), p))))
        floor = band_pattern(p, int(params["band"]))
        spikes = pair_pattern(p, params["spike_pairs"])
        s = spike_profile(grid, params["spikes"])
    elif kind == "sparse":
        params = {**DEFAULT_SPARSE, **params}
        floor = pair_pattern(p, [params["pair"]])
        spikes = np.zeros((p, p))
        s = np.zeros(grid.shape)
    else:
        raise PreconditionError(f"unknown model kind {kind!r}")

    prec = np.eye(p) + float(params["kappa"]) * floor + s[:, None, None] * spikes
    lam_min = np.linalg.eigvalsh(prec)[:, 0].min()
    if lam_min <= 0:
        raise NotPositiveDefiniteError(
            f"couplings too large: precision has eigenvalue {lam_min:.4g} <= 0"
        )
    g = _gains(p, params)
    target = pcoh_arrays(prec)
    prec = g[:, None] * prec * g[None, :]
    mats = inv_pd(prec.astype(np.complex128))
    params = {**params, "p": p}
    return SpectralModel(kind, grid, mats, target, params)


# ---------------------------------------------------------------------------
# moment identities

MOMENT_TOLERANCE_SE = 4.0
MOMENT_MIN_M = 10_000


@dataclass(frozen=True)
class MomentRow:
    """One expectation identity: closed-form truth against its Monte-Carlo mean.

    ``status`` is ``pass``, ``fail``, ``inconclusive`` (outside tolerance but
    with fewer than ``MOMENT_MIN_M`` replicates) or ``skipped``.
    """

    name: str
    description: str
    truth: float
    mc_mean: float
    se: float
    status: str
    reason: str = ""

    @property
    def z(self) -> float:
        return (self.mc_mean - self.truth) / self.se if self.se > 0 else 0.0


MOMENT_IDENTITIES = (
    ("tr_ASBS", "E tr{A S_hat B S_hat}, A = B = S^-1"),
    ("tr2_S", "E tr^2{S_hat}"),
    ("tr_Sinv", "E tr{S_hat^-1}"),
    ("tr_ASinvBSinv", "E tr{A S_hat^-1 B S_hat^-1}, A = B = S"),
    ("tr2_Sinv", "E tr^2{S_hat^-1}"),
)


def moment_truths(s0, k: int) -> dict:
    """Closed-form expectations of the five trace functionals of ``S_hat``.

    With ``c1 = K^2 / ((K-p)^3 - (K-p))``::

        E tr{S^-1 S_hat S^-1 S_hat}  = p + p^2/K
        E tr^2{S_hat}                = tr^2{S} + tr{S^2}/K
        E tr{S_hat^-1}               = K/(K-p) tr{S^-1}           (K > p)
        E tr{S S_hat^-1 S S_hat^-1}  = c1 p K                     (K > p + 1)
        E tr^2{S_hat^-1}             = c1 ((K-p) tr^2{S^-1} + tr{S^-2})

    Entries whose moments do not exist for this ``K`` are omitted.
    """
    s0 = np.asarray(s0.entries if isinstance(s0, HermitianMatrix) else s0)
    p = s0.shape[-1]
    tr, tr2, tri, tri2 = trace_power_arrays(s0)
    out = {"tr_ASBS": p + p**2 / k, "tr2_S": tr**2 + tr2 / k}
    if k > p + 1:
        m = k - p
        c1 = k**2 / (m**3 - m)
        out["tr_Sinv"] = k / m * tri
        out["tr_ASinvBSinv"] = c1 * p * k
        out["tr2_Sinv"] = c1 * (m * tri**2 + tri2)
    return out


def moment_check(s0, k: int, m: int, seed: int) -> list:
    """Monte-Carlo check of the expectation identities in :func:`moment_truths`.

    An identity passes when the MC mean lies within 4 standard errors of the
    truth. The three inverse-moment identities are reported as skipped when
    ``K <= p + 1``. Runs with ``m < 10^4`` never report ``fail``; a miss is
    flagged ``inconclusive`` instead because the sample standard error is not
    trustworthy at that size.

    Raises ``InsufficientTapersError`` when ``K < p`` (``S_hat`` singular).
    """
    s0 = np.asarray(s0.entries if isinstance(s0, HermitianMatrix) else s0)
    p = s0.shape[-1]
    if k < p:
        raise InsufficientTapersError(f"moment check needs K >= p, got K={k}, p={p}")
    if m < 2:
        raise PreconditionError("moment check needs at least 2 replicates")
    truths = moment_truths(s0, k)
    s_hat = draw_spectral_batch(s0, k, m, seed)
    s_inv0 = inv_pd(s0)

    def tr(a):
        return np.real(np.trace(a, axis1=-2, axis2=-1))

    samples = {}
    x = s_inv0 @ s_hat
    samples["tr_ASBS"] = tr(x @ x)
    samples["tr2_S"] = tr(s_hat) ** 2
    if k > p + 1:
        s_hat_inv = inv_pd(s_hat)
        y = s0 @ s_hat_inv
        samples["tr_Sinv"] = tr(s_hat_inv)
        samples["tr_ASinvBSinv"] = tr(y @ y)
        samples["tr2_Sinv"] = tr(s_hat_inv) ** 2

    rows = []
    for name, desc in MOMENT_IDENTITIES:
        if name not in samples:
            rows.append(
                MomentRow(name, desc, np.nan, np.nan, np.nan, "skipped",
                          f"needs K > p + 1, got K={k}, p={p}")
            )
            continue
        v = samples[name]
        mean = float(v.mean())
        se = float(v.std(ddof=1) / np.sqrt(m))
        truth = float(truths[name])
        ok = abs(mean - truth) <= MOMENT_TOLERANCE_SE * se
        status = "pass" if ok else ("fail" if m >= MOMENT_MIN_M else "inconclusive")
        rows.append(MomentRow(name, desc, truth, mean, se, status))
    return rows


# ---------------------------------------------------------------------------
# scenario files


@dataclass(frozen=True)
class Scenario:
    model: SpectralModel
    config: McConfig
    raw: dict


def load_scenario(
    source, threads: int = 1, seed: int | None = None, grid=None, validate: bool = True
) -> Scenario:
    """Read a JSON scenario (path, or an already parsed dict).

    Keys: ``model.kind``, ``model.params``, ``grid`` (``start_hz``,
    ``stop_hz``, ``step_hz``; defaults 0.55, 4.05, 0.1), ``p``, ``K``,
    ``M``, ``seed``, ``methods`` (default: all). ``M`` is required. A
    ``seed`` or ``grid`` argument overrides the file.

    Malformed files raise ``ConfigError``; a model that is not positive
    definite raises ``NotPositiveDefiniteError``; too few tapers for the
    chosen methods raises ``InsufficientTapersError``.
    """
    if isinstance(source, dict):
        raw = source
    else:
        try:
            with open(source) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {source}: {exc}") from exc
    try:
        model_spec = raw["model"]
        kind = model_spec["kind"]
        params = dict(model_spec.get("params", {}))
        if grid is None:
            g = raw.get("grid", {})
            start, stop, step = (
                float(g.get("start_hz", 0.55)),
                float(g.get("stop_hz", 4.05)),
                float(g.get("step_hz", 0.1)),
            )
            if not step > 0 or stop < start:
                raise ConfigError("scenario grid needs step_hz > 0 and stop_hz >= start_hz")
            grid = default_grid(start, stop, step)
        p = int(raw.get("p", params.get("p", 10)))
        k = int(raw["K"])
        m = int(raw["M"])
        base_seed = int(raw["seed"]) if seed is None else int(seed)
        methods = tuple(raw.get("methods", ALL_METHODS))
    except KeyError as exc:
        raise ConfigError(f"scenario is missing key {exc.args[0]!r}") from exc
    except (TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed scenario: {exc}") from exc
    params["p"] = p
    try:
        model = make_model(kind, params, grid)
        cfg = McConfig(k, m, base_seed, methods, threads)
        if validate:
            cfg.validate(p)
    except (NotPositiveDefiniteError, InsufficientTapersError):
        raise
    except (PreconditionError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc
    raw = {**raw, "seed": base_seed, "grid": {
        "start_hz": float(model.grid[0]), "stop_hz": float(model.grid[-1]),
        "n": int(model.grid.size)}}
    return Scenario(model, cfg, raw)


def default_threads() -> int:
    """Worker count from ``SPECCOH_THREADS``, else 1."""
    value = os.environ.get("SPECCOH_THREADS", "")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# campaign


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo settings: ``k`` tapers, ``m`` replicates, base ``seed``."""

    k: int
    m: int
    seed: int
    methods: tuple = ALL_METHODS
    threads: int = 1

    def validate(self, p: int):
        unknown = set(self.methods) - set(ALL_METHODS)
        if unknown:
            raise PreconditionError(f"unknown methods: {sorted(unknown)}")
        if self.m < 1:
            raise PreconditionError("m must be at least 1")
        if self.k < p:
            raise InsufficientTapersError(f"need K >= p, got K={self.k}, p={p}")
        needs_more = set(self.methods) & (set(PRECISION_METHODS) | set(EST_METHODS))
        if needs_more and self.k <= p + 1:
            raise InsufficientTapersError(
                f"{sorted(needs_more)} need K > p + 1, got K={self.k}, p={p}"
            )


def _solution_summary(sol, extra=None):
    out = {
        "alpha": float(np.mean(sol.alpha)),
        "beta": float(np.mean(sol.beta)),
        "clamped_fraction": float(np.mean(sol.clamped)),
    }
    if sol.rho is not None:
        out["rho"] = float(np.mean(sol.rho))
        out["eta"] = float(np.mean(sol.eta))
    if extra is not None:
        out.update(extra)
    return out


def run_frequency(s0, cfg: McConfig, l: int = 0):
    """Mean summed squared error per method at one frequency.

    Returns ``(errors, coefficients)``; ``errors`` always contains ``Raw``.
    """
    s0 = np.asarray(s0.entries if isinstance(s0, HermitianMatrix) else s0)
    p = s0.shape[-1]
    k = cfg.k
    truth = pcoh_arrays(inv_pd(s0))
    oracle = TraceSet(*trace_power_arrays(s0))
    s_hat = draw_spectral_batch(s0, k, cfg.m, cfg.seed, l)
    s_inv = inv_pd(s_hat)

    def score(prec):
        return float(np.mean(squared_error_arrays(pcoh_arrays(prec), truth)))

    errors = {RAW: score(s_inv)}
    coefs = {}
    est = None
    for method in cfg.methods:
        if method == RAW:
            continue
        base = method.removesuffix("-est")
        if method.endswith("-est"):
            if est is None:
                est = estimate_from_arrays(s_hat, k)
            traces = est
        else:
            traces = oracle
        if base in SPECTRAL_METHODS:
            sol = SPECTRAL_METHODS[base](traces, p, k)
            errors[method] = score(inv_pd(affine(s_hat, sol.alpha, sol.beta)))
            coefs[method] = _solution_summary(sol)
        else:
            sol = PRECISION_METHODS[base](traces, p, k)
            errors[method] = score(affine(s_inv, sol.alpha, sol.beta))
            tr_hat = np.real(np.trace(s_hat, axis1=-2, axis2=-1))
            coefs[method] = _solution_summary(
                sol, {"beta_times_tr_shat": float(np.mean(sol.beta * tr_hat))}
            )
    return errors, coefs


def run_campaign(model: SpectralModel, cfg: McConfig) -> PriseReport:
    """PRISE of every configured method against the raw estimate, per frequency.

    Output is a pure function of ``(model, cfg)``; ``cfg.threads`` only sets
    how many frequencies are processed concurrently.
    """
    cfg.validate(model.p)
    threads = max(1, int(cfg.threads))
    idx = range(model.grid.size)
    if threads == 1:
        results = [run_frequency(model.matrices[l], cfg, l) for l in idx]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda l: run_frequency(model.matrices[l], cfg, l), idx))

    per_freq, coefficients = {}, {}
    for f, (errors, coefs) in zip(model.grid, results):
        base = errors[RAW]
        per_freq[float(f)] = {m: prise(base, errors[m]) for m in cfg.methods}
        coefficients[float(f)] = {
            **coefs,
            "mean_sq_error": {m: errors[m] for m in errors},
        }
    meta = {
        "model": model.label,
        "model_params": model.params,
        "p": model.p,
        "K": cfg.k,
        "M": cfg.m,
        "seed": cfg.seed,
        "methods": list(cfg.methods),
    }
    return PriseReport(per_freq, meta, coefficients)
