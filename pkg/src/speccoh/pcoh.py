"""Partial coherence, squared-error scoring and PRISE."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyGridError,
    NonPositiveDiagonalError,
    ZeroBaselineError,
)
from .hermitian import HermitianMatrix


@dataclass(frozen=True, eq=False)
class PartialCoherenceMatrix:
    """Real symmetric ``p x p`` matrix of squared partial coherences.

    The diagonal is set to 1 for display only; scoring uses the pairs j < k.
    """

    values: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[-1]

    def pairs(self) -> np.ndarray:
        j, k = np.triu_indices(self.dim, 1)
        return self.values[..., j, k]


def pcoh_arrays(c):
    """Squared partial coherences ``|c_jk|^2 / (c_jj c_kk)`` for a stack of precision matrices."""
    c = np.asarray(c)
    diag = np.real(np.diagonal(c, axis1=-2, axis2=-1))
    if np.any(~(diag > 0)):
        raise NonPositiveDiagonalError("precision matrix has a non-positive diagonal entry")
    g = np.abs(c) ** 2 / (diag[..., :, None] * diag[..., None, :])
    idx = np.arange(c.shape[-1])
    g[..., idx, idx] = 1.0
    return g


def partial_coherence(c: HermitianMatrix) -> PartialCoherenceMatrix:
    """Squared partial coherence matrix from a precision matrix ``C = S^-1``."""
    return PartialCoherenceMatrix(pcoh_arrays(c.entries))


def squared_error_arrays(est, truth):
    """Sum over pairs j < k of ``(est_jk - truth_jk)^2``; works on stacks."""
    est = np.asarray(est)
    truth = np.asarray(truth)
    if est.shape[-1] != truth.shape[-1]:
        raise DimensionMismatchError(
            f"dimension mismatch: {est.shape[-1]} vs {truth.shape[-1]}"
        )
    j, k = np.triu_indices(est.shape[-1], 1)
    diff = est[..., j, k] - truth[..., j, k]
    return np.sum(diff**2, axis=-1)


def squared_error(estimate: PartialCoherenceMatrix, truth: PartialCoherenceMatrix) -> float:
    return float(squared_error_arrays(estimate.values, truth.values))


def prise(e_basic: float, e_method: float) -> float:
    """Percentage relative improvement in squared error over the raw estimate."""
    if not e_basic > 0:
        raise ZeroBaselineError("baseline mean squared error must be positive")
    # written as 1 - ratio so that e_method >= 0 can never round above 100
    return 100.0 * (1.0 - e_method / e_basic)


def average_prise(per_freq: dict) -> dict:
    """Mean PRISE over frequencies, per method.

    ``per_freq`` maps frequency -> {method -> PRISE %}.
    """
    if not per_freq:
        raise EmptyGridError("no frequencies to average over")
    methods = list(next(iter(per_freq.values())))
    return {m: float(np.mean([row[m] for row in per_freq.values()])) for m in methods}


def fmt(x: float) -> str:
    """12 significant digits, the precision of every numeric CSV field."""
    return f"{x:.12g}"


@dataclass
class PriseReport:
    """PRISE per frequency and averaged over frequencies, per method."""

    per_freq: dict
    metadata: dict = field(default_factory=dict)
    # per-frequency diagnostics: freq -> method -> {"alpha": ..., "beta": ..., ...}
    coefficients: dict = field(default_factory=dict)

    @property
    def methods(self) -> list:
        return list(next(iter(self.per_freq.values()))) if self.per_freq else []

    @property
    def average(self) -> dict:
        return average_prise(self.per_freq)

    def series(self, method: str) -> np.ndarray:
        return np.array([row[method] for row in self.per_freq.values()])

    @property
    def freqs(self) -> np.ndarray:
        return np.array(list(self.per_freq))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["freq_hz", "method", "prise_pct"])
            for f, row in self.per_freq.items():
                for method, value in row.items():
                    w.writerow([fmt(f), method, fmt(value)])

    def write_average_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "prise_pct"])
            for method, value in self.average.items():
                w.writerow([method, fmt(value)])

    def to_json(self) -> dict:
        return {
            "metadata": self.metadata,
            "prise_by_freq": [
                {"freq_hz": float(f), **{m: float(v) for m, v in row.items()}}
                for f, row in self.per_freq.items()
            ],
            "prise_avg": self.average,
            "coefficients": [
                {"freq_hz": float(f), **row} for f, row in self.coefficients.items()
            ],
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_prise_csv(path) -> dict:
    """Parse a ``freq_hz,method,prise_pct`` file back into the per-frequency mapping."""
    out = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.setdefault(float(rec["freq_hz"]), {})[rec["method"]] = float(rec["prise_pct"])
    return out
