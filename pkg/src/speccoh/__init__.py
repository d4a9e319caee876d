"""Shrinkage estimation of spectral and precision matrices for partial coherence.

The package is organised as a pipeline:

* :mod:`speccoh.multitaper` turns a multichannel series into multitaper
  spectral matrices ``S_hat(f)``;
* :mod:`speccoh.shrink_spectral` and :mod:`speccoh.shrink_precision` give
  optimal affine shrinkage coefficients for ``S`` and ``S^-1``;
* :mod:`speccoh.traces` estimates the trace functionals those rules need;
* :mod:`speccoh.pcoh` computes partial coherence and PRISE scores;
* :mod:`speccoh.simlab` runs seeded Monte-Carlo campaigns on synthetic models.
"""

from .errors import (
    BadCountError,
    ConfigError,
    DegenerateTracesError,
    DimensionMismatchError,
    EmptyGridError,
    FrequencyOutOfRangeError,
    InsufficientTapersError,
    LengthMismatchError,
    NonPositiveDenominatorError,
    NonPositiveDiagonalError,
    NonSquareError,
    NotPositiveDefiniteError,
    NumericError,
    PreconditionError,
    SpeccohError,
    TooAsymmetricError,
    ZeroBaselineError,
)
from .hermitian import (
    HermitianMatrix,
    Provenance,
    TraceSet,
    identity,
    invert,
    make_hermitian,
    trace_powers,
)
from .multitaper import (
    EigenCoefficients,
    TaperSet,
    bandwidth,
    eigencoefficients,
    in_valid_band,
    multitaper_matrices,
    sine_tapers,
    spectral_matrix,
)
from .pcoh import (
    PartialCoherenceMatrix,
    PriseReport,
    average_prise,
    partial_coherence,
    prise,
    squared_error,
)
from .sampling import draw_eigencoefficients, draw_spectral_batch
from .shrink_precision import apply_precision_affine, hsp_oracle, qlp_oracle
from .shrink_spectral import (
    Method,
    ShrinkageSolution,
    apply_affine,
    hs_oracle,
    qla_oracle,
    qlb_oracle,
)
from .simlab import (
    McConfig,
    SpectralModel,
    load_scenario,
    make_model,
    moment_check,
    default_grid,
    run_campaign,
)
from .traces import bias_check, estimate_traces

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
