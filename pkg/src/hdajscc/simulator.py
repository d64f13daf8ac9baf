"""Monte Carlo estimation of distortion, power and failure rates.

Randomness is organized in fixed-size chunks of trials. Every chunk owns a
stream derived from ``(seed, rho, n, chunk index)``, so results are identical
for any number of worker threads.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .codec import decode_batch, encode_batch, selected_codewords
from .params import SystemParams
from .quantizer import FAILURE, build_codebook, quantize_batch
from .theory import coefficients, theory_table

MODES = ("full", "genie", "uncoded")
CODEBOOK_POLICIES = ("fixed", "fresh_per_trial")
CHUNK = 256
Z_95 = 1.959963984540054

_STREAM_CODEBOOK = 0
_STREAM_TRIALS = 1


def _point_key(rho: float, n: int) -> tuple[int, int]:
    (bits,) = struct.unpack("<Q", struct.pack("<d", float(rho)))
    return bits, int(n)


def _stream(seed: int, rho: float, n: int, kind: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(*_point_key(rho, n), kind, index))
    return np.random.default_rng(ss)


@dataclass
class TrialResult:
    """Per-block measurements, one array entry per trial.

    ``decode_correct`` and ``inner_zu`` are ``None`` in genie mode, where the
    decoder is bypassed.
    """

    sq_error: np.ndarray
    genie_sq_error: np.ndarray
    block_power: np.ndarray
    quant_error: np.ndarray
    encode_failed: np.ndarray
    inner_su: np.ndarray
    orth_defect: np.ndarray
    candidates: np.ndarray
    decode_correct: np.ndarray | None = None
    inner_zu: np.ndarray | None = None

    def __len__(self):
        return len(self.sq_error)

    @classmethod
    def concat(cls, parts: list["TrialResult"]) -> "TrialResult":
        out = {}
        for name in cls.__dataclass_fields__:
            vals = [getattr(p, name) for p in parts]
            out[name] = None if vals[0] is None else np.concatenate(vals)
        return cls(**out)


def _fsum_mean(x) -> float:
    return math.fsum(x) / len(x) if len(x) else float("nan")


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    T = len(x)
    if T == 0:
        return float("nan"), float("nan")
    m = _fsum_mean(x)
    if T == 1:
        return m, float("nan")
    var = math.fsum((x - m) ** 2) / (T - 1)
    return m, math.sqrt(var / T)


def _measure(S, Z, U, index, cand, Y, X, coeffs, cb, decode: bool) -> TrialResult:
    n = S.shape[1]
    a, b, g = coeffs.alpha, coeffs.beta, coeffs.gamma
    failed = index == FAILURE

    def recon(Uh):
        return Uh + (g / a) * (Y - (a + b) * Uh)

    genie_err = np.sum((S - recon(U)) ** 2, axis=1) / n
    res = dict(
        genie_sq_error=genie_err,
        block_power=np.sum(X * X, axis=1) / n,
        quant_error=np.sum((S - U) ** 2, axis=1) / n,
        encode_failed=failed,
        inner_su=np.sum(S * U, axis=1) / n,
        orth_defect=np.sum((S - U) * U, axis=1) / n,
        candidates=cand,
    )
    if decode:
        dec = decode_batch(Y, cb)
        Uh = cb.codewords[dec]
        res["sq_error"] = np.sum((S - recon(Uh)) ** 2, axis=1) / n
        res["decode_correct"] = (dec == index) & ~failed
        res["inner_zu"] = np.sum(Z * Uh, axis=1) / n
    else:
        res["sq_error"] = genie_err
    return TrialResult(**res)


def _run_chunk(params: SystemParams, coeffs, cb, chunk: int, size: int, decode: bool, fresh: bool) -> TrialResult:
    n = params.n
    rng = _stream(params.seed, params.rho, n, _STREAM_TRIALS, chunk)
    # full-chunk draws keep trial t's values independent of the total trial count
    S = np.sqrt(params.sigma2) * rng.standard_normal((CHUNK, n))[:size]
    Z = np.sqrt(params.N) * rng.standard_normal((CHUNK, n))[:size]
    eps = params.angle_tolerance
    if not fresh:
        X, U, index, cand = encode_batch(S, coeffs, cb, eps, rng)
        return _measure(S, Z, U, index, cand, X + Z, X, coeffs, cb, decode)
    parts = []
    for t in range(size):
        cbt = build_codebook(n, params.rho, coeffs.radius2, rng)
        idx, cand = quantize_batch(S[t : t + 1], cbt, coeffs.target_cos, eps, rng)
        U = selected_codewords(cbt, idx)
        X = coeffs.alpha * S[t : t + 1] + coeffs.beta * U
        parts.append(_measure(S[t : t + 1], Z[t : t + 1], U, idx, cand, X + Z[t : t + 1], X, coeffs, cbt, decode))
    return TrialResult.concat(parts)


def simulate_trials(
    params: SystemParams,
    num_trials: int,
    mode: str = "full",
    codebook_policy: str = "fixed",
    workers: int = 1,
) -> TrialResult:
    """Draw ``num_trials`` source blocks and push them through the scheme."""
    if num_trials < 1:
        raise ValueError(f"num_trials must be >= 1, got {num_trials}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if codebook_policy not in CODEBOOK_POLICIES:
        raise ValueError(f"codebook_policy must be one of {CODEBOOK_POLICIES}, got {codebook_policy!r}")
    if mode == "uncoded":
        params = replace(params, rho=0.0)
    coeffs = coefficients(params)
    fresh = codebook_policy == "fresh_per_trial" and coeffs.radius2 > 0
    cb = None
    if not fresh:
        cb = build_codebook(params.n, params.rho, coeffs.radius2, _stream(params.seed, params.rho, params.n, _STREAM_CODEBOOK))
    decode = mode != "genie"
    sizes = [min(CHUNK, num_trials - lo) for lo in range(0, num_trials, CHUNK)]

    def job(k):
        return _run_chunk(params, coeffs, cb, k, sizes[k], decode, fresh)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, range(len(sizes))))
    else:
        parts = [job(k) for k in range(len(sizes))]
    return TrialResult.concat(parts)


@dataclass(frozen=True)
class CrossTermSummary:
    inner_su_mean: float
    inner_su_stderr: float
    inner_su_reference: float
    inner_su_rel_error: float
    inner_zu_mean: float | None
    inner_zu_stderr: float | None
    inner_zu_zscore: float | None


def cross_term_stats(trials: TrialResult, params: SystemParams) -> CrossTermSummary:
    """Empirical ``E<s,u*>/n`` against ``sigma2 (1 - 2**(-2 rho))`` and ``E<z,u_hat>/n`` against 0."""
    ref = params.sigma2 * (1.0 - 2.0 ** (-2.0 * params.rho))
    m, se = _mean_se(trials.inner_su)
    rel = abs(m - ref) / ref if ref > 0 else abs(m)
    zm = zse = zz = None
    if trials.inner_zu is not None:
        zm, zse = _mean_se(trials.inner_zu)
        zz = zm / zse if zse and zse > 0 else (0.0 if zm == 0 else math.inf)
    return CrossTermSummary(m, se, ref, rel, zm, zse, zz)


@dataclass
class RunReport:
    params: dict
    mode: str
    codebook_policy: str
    num_trials: int
    M: int
    epsilon: float
    mean_distortion: float
    stderr: float
    ci_low: float
    ci_high: float
    genie_mean_distortion: float
    genie_stderr: float
    mean_power: float
    power_stderr: float
    encode_failure_rate: float
    decode_error_rate: float | None
    mean_quant_error: float | None
    mean_orth_defect: float | None
    mean_abs_orth_defect: float | None
    mean_inner_su: float
    inner_su_stderr: float
    mean_inner_zu: float | None
    inner_zu_stderr: float | None
    conditional_distortion_given_error: float | None
    theory: dict
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(params: SystemParams, trials: TrialResult, mode: str, codebook_policy: str) -> RunReport:
    if mode == "uncoded":
        params = replace(params, rho=0.0)
    T = len(trials)
    md, se = _mean_se(trials.sq_error)
    gm, gse = _mean_se(trials.genie_sq_error)
    pm, pse = _mean_se(trials.block_power)
    ok = ~trials.encode_failed
    n_ok = int(ok.sum())
    dec_err = cond = None
    if trials.decode_correct is not None:
        if n_ok:
            dec_err = 1.0 - int(trials.decode_correct[ok].sum()) / n_ok
        wrong = ~trials.decode_correct
        if wrong.any():
            cond = _fsum_mean(trials.sq_error[wrong])
    su_m, su_se = _mean_se(trials.inner_su)
    zu_m = zu_se = None
    if trials.inner_zu is not None:
        zu_m, zu_se = _mean_se(trials.inner_zu)
    theory = theory_table(params)
    warnings = []
    if theory["alpha"] ** 2 < 1e-6 * params.P / params.sigma2:
        warnings.append("numerical margin: alpha**2 < 1e-6 * P / sigma2 (rho is very close to capacity)")
    return RunReport(
        params=params.to_dict(),
        mode=mode,
        codebook_policy=codebook_policy,
        num_trials=T,
        M=params.M,
        epsilon=params.angle_tolerance,
        mean_distortion=md,
        stderr=se,
        ci_low=md - Z_95 * se,
        ci_high=md + Z_95 * se,
        genie_mean_distortion=gm,
        genie_stderr=gse,
        mean_power=pm,
        power_stderr=pse,
        encode_failure_rate=1.0 - n_ok / T,
        decode_error_rate=dec_err,
        mean_quant_error=_fsum_mean(trials.quant_error[ok]) if n_ok else None,
        mean_orth_defect=_fsum_mean(trials.orth_defect[ok]) if n_ok else None,
        mean_abs_orth_defect=_fsum_mean(np.abs(trials.orth_defect[ok])) if n_ok else None,
        mean_inner_su=su_m,
        inner_su_stderr=su_se,
        mean_inner_zu=zu_m,
        inner_zu_stderr=zu_se,
        conditional_distortion_given_error=cond,
        theory=theory,
        warnings=warnings,
    )


def run(
    params: SystemParams,
    num_trials: int,
    mode: str = "full",
    codebook_policy: str = "fixed",
    workers: int = 1,
) -> RunReport:
    """Estimate end-to-end performance at one parameter point.

    ``mode="uncoded"`` forces rho = 0 (scaled uncoded transmission) whatever
    ``params.rho`` says; ``"genie"`` hands the reconstructor the true codeword.
    """
    trials = simulate_trials(params, num_trials, mode, codebook_policy, workers)
    return summarize(params, trials, mode, codebook_policy)


@dataclass(frozen=True)
class SweepFailure:
    rho: float
    n: int
    error: str


def sweep(
    base: SystemParams,
    rho_grid,
    n_grid,
    num_trials: int,
    mode: str = "full",
    codebook_policy: str = "fixed",
    workers: int = 1,
) -> list:
    """One report per ``(rho, n)`` point, rho-major. Invalid points yield a ``SweepFailure``."""
    out = []
    for rho in rho_grid:
        for n in n_grid:
            try:
                p = replace(base, rho=float(rho), n=int(n))
                out.append(run(p, num_trials, mode, codebook_policy, workers))
            except (ValueError, RuntimeError) as e:
                out.append(SweepFailure(float(rho), int(n), f"{type(e).__name__}: {e}"))
    return out
