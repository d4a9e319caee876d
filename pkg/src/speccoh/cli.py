"""Command-line front end: ``speccoh estimate | simulate | diagnose``.

Exit codes: 0 success, 2 usage or I/O error, 3 precondition failure,
4 numerical failure. All numbers are written with 12 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    InsufficientTapersError,
    NotPositiveDefiniteError,
    NumericError,
    PreconditionError,
    SpeccohError,
)
from .hermitian import inv_pd
from .multitaper import bandwidth, in_valid_band, multitaper_matrices
from .pcoh import fmt, pcoh_arrays
from .shrink_precision import hsp_oracle, qlp_oracle
from .shrink_spectral import affine, hs_oracle, qla_oracle, qlb_oracle
from .simlab import default_grid, default_threads, load_scenario, moment_check, run_campaign
from .traces import bias_check, estimate_from_arrays

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_NUMERIC = 0, 2, 3, 4

SPECTRAL = {"hs": hs_oracle, "qla": qla_oracle, "qlb": qlb_oracle}
PRECISION = {"hsp": hsp_oracle, "qlp": qlp_oracle}
METHODS = ("raw",) + tuple(SPECTRAL) + tuple(PRECISION)


class UsageError(Exception):
    """Bad flags or unreadable input; maps to exit code 2."""


def _warn(msg):
    print(f"speccoh: warning: {msg}", file=sys.stderr)


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"--out: cannot create {out}: {exc}") from exc
    return out


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _num(x) -> str:
    return "" if x is None or not np.isfinite(x) else fmt(float(x))


def _grid(args):
    start = 0.55 if args.fstart is None else args.fstart
    stop = 4.05 if args.fstop is None else args.fstop
    step = 0.1 if args.fstep is None else args.fstep
    if not step > 0:
        raise UsageError("--fstep must be positive")
    if stop < start:
        raise UsageError("--fstop must not be below --fstart")
    return default_grid(start, stop, step)


def _threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        return args.threads
    return default_threads()


# ---------------------------------------------------------------------------
# estimate


def read_series(path, p=None):
    """Read a ``t,ch1,...,chp`` CSV into a ``(p, n)`` array."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise UsageError(f"input: cannot read {path}: {exc}") from exc
    if not rows or len(rows[0]) < 2 or rows[0][0].strip().lower() != "t":
        raise UsageError(f"input: {path} needs a header 't,ch1,...,chp'")
    n_ch = len(rows[0]) - 1
    if p is not None and p != n_ch:
        raise UsageError(f"--p {p} does not match the {n_ch} channels in {path}")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise UsageError(f"input: non-numeric value in {path}: {exc}") from exc
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != n_ch + 1:
        raise UsageError(f"input: {path} needs at least two rows of {n_ch + 1} columns")
    if not np.all(np.isfinite(data)):
        raise UsageError(f"input: {path} contains non-finite values")
    return data[:, 1:].T


def estimate_pcoh(x, k, freqs, dt, method):
    """Partial coherence of a ``(p, n)`` series at each frequency.

    Shrinkage methods always use data-driven trace estimates. Returns
    ``(pcoh, alpha, beta)`` with ``pcoh`` of shape ``(len(freqs), p, p)``.
    """
    s_hat = multitaper_matrices(x, k, freqs, dt)
    p = s_hat.shape[-1]
    nan = np.full(len(freqs), np.nan)
    if method == "raw":
        return pcoh_arrays(inv_pd(s_hat)), nan, nan
    traces = estimate_from_arrays(s_hat, k)
    if method in SPECTRAL:
        sol = SPECTRAL[method](traces, p, k)
        prec = inv_pd(affine(s_hat, sol.alpha, sol.beta))
    else:
        sol = PRECISION[method](traces, p, k)
        prec = affine(inv_pd(s_hat), sol.alpha, sol.beta)
    return pcoh_arrays(prec), np.broadcast_to(sol.alpha, nan.shape), np.broadcast_to(sol.beta, nan.shape)


def cmd_estimate(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    if not args.dt > 0:
        raise UsageError("--dt must be positive")
    if args.p is not None:
        if args.method != "raw" and args.k <= args.p + 1:
            raise InsufficientTapersError(
                f"--method {args.method} needs --k > --p + 1, got --k {args.k} --p {args.p}"
            )
        if args.k < args.p:
            raise InsufficientTapersError(f"--k {args.k} is below --p {args.p}")
    freqs = _grid(args)
    x = read_series(args.input, args.p)
    p, n = x.shape
    if args.method != "raw" and args.k <= p + 1:
        raise InsufficientTapersError(
            f"--method {args.method} needs --k > p + 1 = {p + 1}, got --k {args.k}"
        )
    out = _out_dir(args.out)
    band = [in_valid_band(f, args.k, n, args.dt) for f in freqs]
    for f, ok in zip(freqs, band):
        if not ok:
            _warn(
                f"{f:g} Hz lies outside the valid band (B/2, Nyquist - B/2) with "
                f"B = {bandwidth(args.k, n, args.dt):.6g} Hz"
            )
    g2, alpha, beta = estimate_pcoh(x, args.k, freqs, args.dt, args.method)

    j, kk = np.triu_indices(p, 1)
    _write_rows(
        out / "pcoh.csv",
        ["freq_hz", "j", "k", "pcoh"],
        [
            [fmt(f), a + 1, b + 1, fmt(g2[l, a, b])]
            for l, f in enumerate(freqs)
            for a, b in zip(j, kk)
        ],
    )
    doc = {
        "input": str(args.input),
        "method": args.method,
        "k": args.k,
        "p": p,
        "n": n,
        "dt": args.dt,
        "bandwidth_hz": bandwidth(args.k, n, args.dt),
        "frequencies": [
            {
                "freq_hz": float(f),
                "in_band": bool(band[l]),
                "alpha": None if np.isnan(alpha[l]) else float(alpha[l]),
                "beta": None if np.isnan(beta[l]) else float(beta[l]),
                "pcoh": g2[l].tolist(),
            }
            for l, f in enumerate(freqs)
        ],
    }
    with open(out / "pcoh.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out / 'pcoh.csv'} and {out / 'pcoh.json'}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    threads = _threads(args)
    scenario = load_scenario(
        args.scenario, threads=threads, seed=args.seed, grid=_grid(args) if _grid_given(args) else None
    )
    out = _out_dir(args.out)
    report = run_campaign(scenario.model, scenario.config)
    report.metadata["scenario"] = scenario.raw
    report.write_csv(out / "prise_by_freq.csv")
    report.write_average_csv(out / "prise_avg.csv")
    report.write_json(out / "report.json")
    for method, value in report.average.items():
        print(f"{method:8s} {value:8.2f} %")
    return EXIT_OK


def _grid_given(args) -> bool:
    return any(v is not None for v in (args.fstart, args.fstop, args.fstep))


# ---------------------------------------------------------------------------
# diagnose


def cmd_diagnose(args) -> int:
    scenario = load_scenario(
        args.scenario, seed=args.seed, grid=_grid(args) if _grid_given(args) else None, validate=False
    )
    model, cfg = scenario.model, scenario.config
    if not 0 <= args.freq_index < model.grid.size:
        raise UsageError(f"--freq-index must lie in [0, {model.grid.size - 1}]")
    s0 = model.matrices[args.freq_index]
    p = model.p
    out = _out_dir(args.out)

    rows = moment_check(s0, cfg.k, cfg.m, cfg.seed)
    _write_rows(
        out / "moments.csv",
        ["identity", "description", "truth", "mc_mean", "se", "z", "status", "reason"],
        [
            [r.name, r.description, _num(r.truth), _num(r.mc_mean), _num(r.se),
             _num(r.z) if r.status != "skipped" else "", r.status, r.reason]
            for r in rows
        ],
    )

    header = ["estimator", "truth", "expected_mean", "mc_mean", "se", "variance", "status", "reason"]
    if cfg.k <= p + 1 or cfg.m < 100:
        reason = (
            f"needs K > p + 1, got K={cfg.k}, p={p}" if cfg.k <= p + 1
            else f"needs M >= 100, got M={cfg.m}"
        )
        names = ("tr_s", "tr_s2", "tr_sinv", "tr_sinv2", "tr_sinv2_two_term")
        bias_rows = [[n, "", "", "", "", "", "skipped", reason] for n in names]
    else:
        rep = bias_check(s0, cfg.k, cfg.m, cfg.seed)
        bias_rows = []
        for r in rep.rows:
            if r.name == "tr_sinv2":
                status = "info"  # no closed-form mean for the one-term estimator
            else:
                status = "pass" if abs(r.mc_mean - r.expected_mean) <= 3 * r.se else "fail"
            bias_rows.append(
                [r.name, _num(r.truth), _num(r.expected_mean), _num(r.mc_mean), _num(r.se),
                 _num(r.variance), status, ""]
            )
        bias_rows.append(
            ["tr_sinv2_two_term_negative_fraction", "", "", _num(rep.two_term_negative_fraction),
             "", "", "info", ""]
        )
    _write_rows(out / "bias.csv", header, bias_rows)
    for r in rows:
        print(f"{r.name:14s} {r.status}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_grid_flags(p):
    p.add_argument("--fstart", type=float, default=None, help="first frequency, Hz (default 0.55)")
    p.add_argument("--fstop", type=float, default=None, help="last frequency, Hz (default 4.05)")
    p.add_argument("--fstep", type=float, default=None, help="frequency step, Hz (default 0.1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speccoh",
        description="Shrinkage estimation of partial coherence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="partial coherence from a multichannel CSV")
    est.add_argument("input", help="CSV with header t,ch1,...,chp")
    est.add_argument("--dt", type=float, required=True, help="sampling interval, s")
    est.add_argument("--k", type=int, required=True, help="number of sine tapers")
    est.add_argument("--p", type=int, default=None, help="expected number of channels")
    est.add_argument("--method", choices=METHODS, default="raw")
    _add_grid_flags(est)
    est.add_argument("--out", default=".", help="output directory")
    est.set_defaults(func=cmd_estimate)

    sim = sub.add_parser("simulate", help="Monte-Carlo PRISE campaign from a scenario file")
    sim.add_argument("scenario", help="JSON scenario file")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: $SPECCOH_THREADS or 1)")
    _add_grid_flags(sim)
    sim.add_argument("--out", default=".", help="output directory")
    sim.set_defaults(func=cmd_simulate)

    dia = sub.add_parser("diagnose", help="moment-identity and trace-bias checks")
    dia.add_argument("scenario", help="JSON scenario file")
    dia.add_argument("--seed", type=int, required=True)
    dia.add_argument("--freq-index", type=int, default=0,
                     help="grid index of the true spectral matrix to test (default 0)")
    _add_grid_flags(dia)
    dia.add_argument("--out", default=".", help="output directory")
    dia.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"speccoh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"speccoh: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NotPositiveDefiniteError as exc:
        # on real data a singular estimate means degenerate input or K < p
        print(f"speccoh: error: spectral matrix not positive definite: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION if args.command == "estimate" else EXIT_NUMERIC
    except (NumericError, SpeccohError) as exc:
        print(f"speccoh: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"speccoh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
