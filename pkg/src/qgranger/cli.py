"""Command-line front end: simulate, analyze, sweep.

Configuration is JSON, data files are CSV with a header row (plain `.`
decimals), and analysis results are JSON reports.  Exit codes: 0 when the
analysis reaches a verdict (CAUSAL or NON_CAUSAL), 2 when the one-sided tests
cannot decide (NOT_DECIDED), 1 on any error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional

import numpy as np

from . import __version__
from .bounds import (
    PriorBounds,
    default_q_range,
    highres_sufficient_test,
    midtread_sufficient_test,
    nonuniform_norm_bounds,
    nonuniform_sufficient_test,
    s_bounds_grid,
)
from .causality import binary_causality_test, build_causality_matrix, smallest_singular_value
from .moments import estimate_moments
from .quantize import (
    BinaryQuantizer,
    UniformQuantizer,
    make_saturated_uniform,
    quantize_series,
    spec_from_dict,
)
from .report import DecisionReport, QRecord, Verdict
from .signals import DEFAULT_BURN_IN, coupled_ar2_example, simulate_var

MODES = ("binary", "nonuniform", "midtread", "highres")


class ConfigError(ValueError):
    pass


class CsvFormatError(ValueError):
    pass


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _read_series_csv(path: str, columns: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Read named numeric columns from a headered CSV, reporting bad lines."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise CsvFormatError(f"cannot open input {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        missing = [c for c in columns if c not in header]
        if missing:
            raise CsvFormatError(
                f"{path}: line 1: missing required column(s) {', '.join(missing)}; "
                f"found {header}"
            )
        idx = {c: header.index(c) for c in columns}
        out: dict[str, list[float]] = {c: [] for c in columns}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) < len(header):
                raise CsvFormatError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            for c in columns:
                try:
                    out[c].append(float(row[idx[c]]))
                except ValueError:
                    raise CsvFormatError(
                        f"{path}: line {lineno}: column {c!r} is not numeric: {row[idx[c]]!r}"
                    ) from None
    return {c: np.asarray(v) for c, v in out.items()}


def _priors_from_config(cfg: dict) -> PriorBounds:
    p = cfg.get("priors")
    if not isinstance(p, dict):
        raise ConfigError("this mode requires a 'priors' object in the config")
    try:
        return PriorBounds(
            rho_xz_max=float(p["rho_xz_max"]),
            rho_zz_max=float(p["rho_zz_max"]),
            sigma_x=tuple(float(v) for v in p["sigma_x"]),
            sigma_z=tuple(float(v) for v in p["sigma_z"]),
            gamma_xz_max=float(p.get("gamma_xz_max", 0.0)),
        )
    except KeyError as exc:
        raise ConfigError(f"priors are missing required key {exc.args[0]!r}") from None


def _quantizer_from_config(cfg: dict, key: str, default=None):
    spec = cfg.get(key)
    if spec is None:
        if default is not None:
            return default
        raise ConfigError(f"this mode requires a {key!r} quantizer spec in the config")
    return spec_from_dict(spec)


def _resolve_q_range(cfg: dict, m: int, n: Optional[int]):
    if cfg.get("q") is not None:
        q = int(cfg["q"])
        return range(q, q + 1)
    if cfg.get("q_range") is not None:
        lo, hi = (int(v) for v in cfg["q_range"])
        return range(lo, hi + 1)
    return default_q_range(m, n)


def _matrix_payload(moments, m: int, q_range) -> dict[str, list[list[float]]]:
    return {
        f"C_q{q}": build_causality_matrix(moments, m, q).entries.tolist() for q in q_range
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    for flag in ("mode", "m", "q", "theta", "seed"):
        val = getattr(args, flag, None)
        if val is not None:
            cfg[flag] = val
    if args.input is not None:
        cfg["input"] = args.input
    if args.output is not None:
        cfg["output"] = args.output

    mode = cfg.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    m = int(cfg.get("m", 2))
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m}")
    if "input" not in cfg:
        raise ConfigError("analyze needs an input CSV (--input or config key 'input')")

    data = _read_series_csv(cfg["input"], ("xq", "zq"))
    xq, zq = data["xq"], data["zq"]
    n = xq.size
    q_range = _resolve_q_range(cfg, m, n)
    q_max = max(q_range)
    if n < 4 * q_max:
        raise ConfigError(
            f"input has n={n} samples but depth q={q_max} needs n >= 4*q = {4 * q_max} "
            "(covariance lags are only reliable up to a quarter of the record)"
        )

    zero_mean = bool(cfg.get("zero_mean", mode == "binary"))
    moments = estimate_moments(xq, zq, m, q_max, zero_mean=zero_mean)

    if mode == "binary":
        theta = float(cfg.get("theta", 0.1))
        decision = binary_causality_test(moments, m, theta)
        records = [
            QRecord(
                q=m,
                sigma_min=decision.sigma_min,
                bound=theta,
                margin=theta - decision.sigma_min,
            )
        ]
        verdict = decision.verdict
        matrices = {"R": decision.matrix.entries.tolist()} if args.emit_matrices else None
        theta_out = theta
    else:
        theta_out = None
        bounds_cfg = cfg.get("bounds", {})
        if mode == "nonuniform":
            priors = _priors_from_config(cfg)
            spec_x = _quantizer_from_config(cfg, "quantizer_x")
            spec_z = _quantizer_from_config(cfg, "quantizer_z")
            result = nonuniform_sufficient_test(
                moments,
                priors,
                spec_x,
                spec_z,
                m,
                q_range,
                mode=bounds_cfg.get("mode", "grid"),
                grid_density=int(bounds_cfg.get("grid_density", 41)),
            )
        else:
            priors = _priors_from_config(cfg)
            spec_x = _quantizer_from_config(cfg, "quantizer_x")
            spec_z = _quantizer_from_config(cfg, "quantizer_z")
            if not isinstance(spec_x, UniformQuantizer) or not isinstance(spec_z, UniformQuantizer):
                raise ConfigError(f"mode {mode!r} requires uniform quantizer specs")
            test = midtread_sufficient_test if mode == "midtread" else highres_sufficient_test
            result = test(moments, priors, spec_x.delta, spec_z.delta, m, q_range)
        verdict = result.verdict
        records = result.records
        matrices = _matrix_payload(moments, m, q_range) if args.emit_matrices else None

    report = DecisionReport(
        verdict=verdict,
        mode=mode,
        m=m,
        records=records,
        theta=theta_out,
        matrices=matrices,
        config={k: v for k, v in cfg.items() if k not in ("input", "output")},
        version=__version__,
    )
    payload = report.to_json()
    if cfg.get("output"):
        with open(cfg["output"], "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return 0 if verdict in (Verdict.CAUSAL, Verdict.NON_CAUSAL) else 2


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.output is not None:
        cfg["output"] = args.output
    sim = cfg.get("simulate", {})
    n = int(sim.get("n", 1000))
    if n < 1:
        raise ConfigError(f"simulate needs n >= 1, got {n}")
    burn_in = int(sim.get("burn_in", DEFAULT_BURN_IN))
    causal = bool(sim.get("causal", True))
    seed = int(cfg.get("seed", 0))
    out_path = cfg.get("output")
    if not out_path:
        raise ConfigError("simulate needs an output path (--output or config key 'output')")

    spec_x = _quantizer_from_config(cfg, "quantizer_x", default=BinaryQuantizer(0.0))
    spec_z = _quantizer_from_config(cfg, "quantizer_z", default=BinaryQuantizer(0.0))
    pair = simulate_var(coupled_ar2_example(causal), n, burn_in=burn_in, seed=seed)
    xq = quantize_series(pair.x, spec_x)
    zq = quantize_series(pair.z, spec_z)

    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "x", "z", "xq", "zq"])
        for k in range(n):
            writer.writerow(
                [
                    k + 1,
                    repr(float(pair.x[k])),
                    repr(float(pair.z[k])),
                    repr(float(xq[k])),
                    repr(float(zq[k])),
                ]
            )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.output is not None:
        cfg["output"] = args.output
    sweep = cfg.get("sweep", {})
    max_bits = int(sweep.get("max_bits", 4))
    if not 1 <= max_bits <= 8:
        raise ConfigError(f"sweep max_bits must be in [1, 8], got {max_bits}")
    n_seeds = int(sweep.get("seeds", 20))
    n = int(sweep.get("n", 1000))
    q = int(sweep.get("q", 6))
    m = int(cfg.get("m", 2))
    causal = bool(sweep.get("causal", True))
    gran_x = tuple(float(v) for v in sweep.get("granular_x", (-3.0, 3.0)))
    gran_z = tuple(float(v) for v in sweep.get("granular_z", (-5.0, 5.0)))
    base_seed = int(cfg.get("seed", 0))
    priors = _priors_from_config(cfg)
    bounds_cfg = cfg.get("bounds", {})
    grid_density = int(bounds_cfg.get("grid_density", 41))
    zero_mean = bool(cfg.get("zero_mean", False))
    out_path = cfg.get("output")
    if not out_path:
        raise ConfigError("sweep needs an output path (--output or config key 'output')")
    if n < 4 * q:
        raise ConfigError(f"sweep needs n >= 4*q = {4 * q}, got n={n}")

    model = coupled_ar2_example(causal)
    pairs = [simulate_var(model, n, seed=base_seed + i) for i in range(n_seeds)]

    rows = []
    for b_x in range(1, max_bits + 1):
        spec_x = make_saturated_uniform(*gran_x, b_x)
        for b_z in range(1, max_bits + 1):
            spec_z = make_saturated_uniform(*gran_z, b_z)
            s_xz, s_zz, s_z = s_bounds_grid(priors, spec_x, spec_z, grid_density)
            n_one, n_inf = nonuniform_norm_bounds(s_xz, s_zz, s_z, m, q)
            bound = float(np.sqrt(n_one * n_inf))
            margins = []
            sigmas = []
            for pair in pairs:
                xq = quantize_series(pair.x, spec_x)
                zq = quantize_series(pair.z, spec_z)
                moments = estimate_moments(xq, zq, m, q, zero_mean=zero_mean)
                sigma = smallest_singular_value(build_causality_matrix(moments, m, q))
                sigmas.append(sigma)
                margins.append(bound - sigma)
            rows.append(
                {
                    "b_x": b_x,
                    "b_z": b_z,
                    "bound": bound,
                    "sigma_min_mean": float(np.mean(sigmas)),
                    "margin_mean": float(np.mean(margins)),
                    "margin_std": float(np.std(margins)),
                    "seeds": n_seeds,
                }
            )

    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgranger",
        description="Granger causality inference from quantized Gaussian time series",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="run a causality test on quantized data")
    p_analyze.add_argument("--config", help="JSON config path")
    p_analyze.add_argument("--input", help="CSV with xq and zq columns")
    p_analyze.add_argument("--output", help="where to write the JSON report (default stdout)")
    p_analyze.add_argument("--mode", choices=MODES)
    p_analyze.add_argument("--m", type=int, help="partial Markov order")
    p_analyze.add_argument("--q", type=int, help="single causality-matrix depth")
    p_analyze.add_argument("--theta", type=float, help="binary decision threshold")
    p_analyze.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    p_analyze.add_argument(
        "--emit-matrices", action="store_true", help="include matrices in the report"
    )
    p_analyze.set_defaults(func=cmd_analyze)

    p_sim = sub.add_parser("simulate", help="simulate the bundled example pair and quantize it")
    p_sim.add_argument("--config", help="JSON config path")
    p_sim.add_argument("--output", help="CSV output path")
    p_sim.add_argument("--seed", type=int)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="margin table over quantizer bit counts")
    p_sweep.add_argument("--config", help="JSON config path")
    p_sweep.add_argument("--output", help="CSV output path")
    p_sweep.add_argument("--seed", type=int)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CsvFormatError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
