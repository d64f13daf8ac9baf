"""Command-line front end: ``theory``, ``run`` and ``sweep`` subcommands.

Exit codes: 0 success, 2 usage/config error, 3 resource error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone

from . import config as cfgmod
from .params import ParameterError, ResourceError, default_epsilon
from .simulator import RunReport, SweepFailure, run, sweep
from .theory import capacity, coefficients, distortion_rate, effective_decode_snr, optimal_distortion

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE = 0, 2, 3
DEFAULT_TRIALS = {"full": 10_000, "genie": 10_000, "uncoded": 100_000}

CSV_COLUMNS = [
    "rho", "n", "M", "num_trials", "mode", "mean_distortion", "stderr", "mean_power",
    "encode_failure_rate", "decode_error_rate", "mean_quant_error", "genie_distortion",
    "D_star", "D_rho", "alpha", "beta", "gamma", "seed", "error",
]


def g9(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool) or isinstance(x, int):
        return str(x)
    return f"{x:.9g}"


def _round9(obj):
    if isinstance(obj, float):
        return obj if not math.isfinite(obj) else float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def report_json(report: RunReport, deterministic: bool, elapsed: float | None = None) -> str:
    d = _round9(report.to_dict())
    if not deterministic:
        d["created_utc"] = datetime.now(timezone.utc).isoformat()
        d["elapsed_s"] = round(elapsed or 0.0, 3)
    return json.dumps(d, indent=2, sort_keys=False, allow_nan=True) + "\n"


def csv_row(item, mode: str, seed: int) -> list[str]:
    if isinstance(item, SweepFailure):
        row = {c: "" for c in CSV_COLUMNS}
        row.update(rho=g9(item.rho), n=str(item.n), mode=mode, seed=str(seed), error=item.error)
        return [row[c] for c in CSV_COLUMNS]
    p, th = item.params, item.theory
    row = {
        "rho": g9(p["rho"]),
        "n": str(p["n"]),
        "M": str(item.M),
        "num_trials": str(item.num_trials),
        "mode": item.mode,
        "mean_distortion": g9(item.mean_distortion),
        "stderr": g9(item.stderr),
        "mean_power": g9(item.mean_power),
        "encode_failure_rate": g9(item.encode_failure_rate),
        "decode_error_rate": g9(item.decode_error_rate),
        "mean_quant_error": g9(item.mean_quant_error),
        "genie_distortion": g9(item.genie_mean_distortion),
        "D_star": g9(th["D_star"]),
        "D_rho": g9(th["D_rho"]),
        "alpha": g9(th["alpha"]),
        "beta": g9(th["beta"]),
        "gamma": g9(th["gamma"]),
        "seed": str(p["seed"]),
        "error": "",
    }
    return [row[c] for c in CSV_COLUMNS]


def render_csv(items, mode: str, seed: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for it in items:
        w.writerow(csv_row(it, mode, seed))
    return buf.getvalue()


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_theory(cfg: cfgmod.RunConfig) -> int:
    cfg.require("sigma2", "power", "noise")
    s2, P, N = cfg.sigma2, cfg.power, cfg.noise
    C = capacity(P, N)
    print(f"C = {g9(C)} bits   D* = {g9(optimal_distortion(s2, P, N))}   (sigma2={g9(s2)}, P={g9(P)}, N={g9(N)})")
    cols = ["rho", "D_rho", "alpha", "beta", "gamma", "Delta", "radius2", "effective_snr"]
    print("  ".join(f"{c:>15}" for c in cols))
    rhos = cfg.rho or (0.0,)
    failures = 0
    for rho in rhos:
        try:
            p = cfg.params(rho=rho, n=1)
            co = coefficients(p)
            vals = [rho, distortion_rate(s2, rho), co.alpha, co.beta, co.gamma, co.Delta, co.radius2,
                    effective_decode_snr(co, s2, N)]
            print("  ".join(f"{g9(v):>15}" for v in vals))
        except (ParameterError, ResourceError) as e:
            failures += 1
            print(f"{g9(rho):>15}  error: {e}")
    return EXIT_USAGE if failures == len(rhos) else EXIT_OK


def _trials(cfg):
    return cfg.trials if cfg.trials is not None else DEFAULT_TRIALS[cfg.mode]


def cmd_run(cfg: cfgmod.RunConfig, deterministic: bool = False) -> int:
    params = cfg.params()
    t0 = time.perf_counter()
    rep = run(params, _trials(cfg), cfg.mode, cfg.codebook_policy, cfg.workers)
    elapsed = time.perf_counter() - t0
    body = report_json(rep, deterministic, elapsed) if cfg.format == "json" else render_csv([rep], cfg.mode, cfg.seed)
    summary = (
        f"mode={rep.mode} rho={g9(rep.params['rho'])} n={rep.params['n']} M={rep.M} trials={rep.num_trials}: "
        f"mean_distortion={g9(rep.mean_distortion)} 95% CI [{g9(rep.ci_low)}, {g9(rep.ci_high)}] "
        f"D*={g9(rep.theory['D_star'])} mean_power={g9(rep.mean_power)} "
        f"encode_failure_rate={g9(rep.encode_failure_rate)} decode_error_rate={g9(rep.decode_error_rate) or 'n/a'}"
    )
    if cfg.out in (None, "-"):
        sys.stdout.write(body)
        print(summary, file=sys.stderr)
    else:
        _write(body, cfg.out)
        print(summary)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(cfg: cfgmod.RunConfig) -> int:
    if not cfg.rho or not cfg.n:
        _write(render_csv([], cfg.mode, cfg.seed), cfg.out)
        print("error: empty rho or n grid", file=sys.stderr)
        return EXIT_USAGE
    base = cfg.params(rho=0.0, n=cfg.n[0])
    total = len(cfg.rho) * len(cfg.n)
    items = []
    for i, rho in enumerate(cfg.rho):
        for j, n in enumerate(cfg.n):
            items.extend(sweep(base, [rho], [n], _trials(cfg), cfg.mode, cfg.codebook_policy, cfg.workers))
            print(f"point {i * len(cfg.n) + j + 1}/{total}", file=sys.stderr)
    _write(render_csv(items, cfg.mode, cfg.seed), cfg.out)
    for it in items:
        if isinstance(it, RunReport):
            for w in it.warnings:
                print(f"warning (rho={g9(it.params['rho'])}, n={it.params['n']}): {w}", file=sys.stderr)
    ok = sum(isinstance(it, RunReport) for it in items)
    return EXIT_OK if ok else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value config file; flags override it")
    common.add_argument("--sigma2", type=float, help="source variance")
    common.add_argument("--power", type=float, help="channel input power budget P")
    common.add_argument("--noise", type=float, help="channel noise variance N")
    common.add_argument("--rho", help="quantizer rate(s) in bits, comma separated")
    common.add_argument("--n", help="blocklength(s), comma separated")
    common.add_argument("--trials", type=int)
    common.add_argument("--mode", choices=["full", "genie", "uncoded"])
    common.add_argument("--epsilon", type=float, help=f"encoder angle tolerance (default 0.5/sqrt(n), e.g. {default_epsilon(48):.4g} at n=48)")
    common.add_argument("--delta", type=float, help="codeword-sphere radius shrink factor in [0, 1)")
    common.add_argument("--seed", type=int)
    common.add_argument("--codebook-policy", choices=["fixed", "fresh_per_trial"])
    common.add_argument("--workers", type=int, help="worker threads; results do not depend on it")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--deterministic", action="store_true", help="omit timestamps so reruns are byte-identical")

    ap = argparse.ArgumentParser(prog="hdajscc", description="Superimposed coded/uncoded Gaussian source transmission simulator")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("theory", parents=[common], help="closed-form constants per rho")
    sub.add_parser("run", parents=[common], help="Monte Carlo run at one (rho, n)")
    sub.add_parser("sweep", parents=[common], help="Monte Carlo sweep over rho x n, CSV output")
    return ap


def config_from_args(args) -> cfgmod.RunConfig:
    cfg = cfgmod.load(args.config) if args.config else cfgmod.RunConfig()
    overrides = {}
    for key in ("sigma2", "power", "noise", "trials", "mode", "epsilon", "delta", "seed", "codebook_policy", "workers", "out", "format"):
        v = getattr(args, key)
        if v is not None:
            overrides[key] = v
    for key in ("rho", "n"):
        v = getattr(args, key)
        if v is not None:
            overrides[key] = cfgmod.parse_value(key, v)
    return replace(cfg, **overrides).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "theory":
            return cmd_theory(cfg)
        if args.command == "run":
            return cmd_run(cfg, args.deterministic)
        return cmd_sweep(cfg)
    except ResourceError as e:
        print(f"resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (cfgmod.ConfigError, ParameterError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
