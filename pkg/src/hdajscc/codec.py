"""Blocklength-n encoder, AWGN channel, minimum-angle decoder and reconstructor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ParameterError, SystemParams, UsageError
from .quantizer import FAILURE, Codebook, _row_slices, quantize_batch
from .theory import SchemeCoefficients


@dataclass(frozen=True)
class EncodeRecord:
    chosen_index: int  # FAILURE when no codeword had a typical angle
    encode_failed: bool
    block_power: float
    candidates: int = 0


@dataclass(frozen=True)
class ChannelBlock:
    x: np.ndarray
    y: np.ndarray
    z_variance: float

    @property
    def noise(self) -> np.ndarray:
        return self.y - self.x


@dataclass(frozen=True)
class TrialMeta:
    chosen_index: int
    decoded_index: int  # equals chosen_index in genie mode
    encode_failed: bool
    block_power: float
    quant_error: float
    sq_error: float


def _check(cb: Codebook, coeffs: SchemeCoefficients):
    if cb.radius2 != coeffs.radius2:
        raise UsageError(f"codebook radius2={cb.radius2} does not match coefficients radius2={coeffs.radius2}")


def selected_codewords(cb: Codebook, index: np.ndarray) -> np.ndarray:
    """Codeword rows for ``index``, with the zero vector wherever encoding failed."""
    U = cb.codewords[np.where(index == FAILURE, 0, index)]
    U[index == FAILURE] = 0.0
    return U


def encode_batch(S, coeffs: SchemeCoefficients, cb: Codebook, epsilon: float, rng):
    """Vectorized encoder: returns ``(X, U, index, candidates)``."""
    S = np.atleast_2d(np.asarray(S, dtype=float))
    _check(cb, coeffs)
    index, cand = quantize_batch(S, cb, coeffs.target_cos, epsilon, rng)
    U = selected_codewords(cb, index)
    X = coeffs.alpha * S + coeffs.beta * U
    return X, U, index, cand


def encode(s, coeffs: SchemeCoefficients, cb: Codebook, rng, epsilon: float):
    """``x = alpha*s + beta*u*``, with ``u* = 0`` when quantization fails.

    No per-block power clipping: the power budget holds only in expectation.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size != cb.n:
        raise UsageError(f"source block must be a length-{cb.n} vector, got shape {s.shape}")
    X, _, index, cand = encode_batch(s[None, :], coeffs, cb, epsilon, rng)
    x = X[0]
    i = int(index[0])
    rec = EncodeRecord(
        chosen_index=i,
        encode_failed=i == FAILURE,
        block_power=float(x @ x) / cb.n,
        candidates=int(cand[0]),
    )
    return x, rec


def awgn(x, N: float, rng) -> np.ndarray:
    """``y = x + z`` with ``z`` i.i.d. normal(0, N)."""
    if not N > 0:
        raise ParameterError(f"noise variance must be > 0, got {N!r}")
    x = np.asarray(x, dtype=float)
    return x + np.sqrt(N) * rng.standard_normal(x.shape)


def decode_batch(Y, cb: Codebook) -> np.ndarray:
    """Row-wise ``argmax_i <y, u_i>``; ties go to the lowest index."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape[1] != cb.n:
        raise UsageError(f"received block length {Y.shape[1]} does not match codebook n={cb.n}")
    out = np.empty(Y.shape[0], dtype=np.int64)
    for sl in _row_slices(Y.shape[0], cb.M):
        out[sl] = np.argmax(Y[sl] @ cb.codewords.T, axis=1)
    return out


def decode_codeword(y, cb: Codebook) -> int:
    return int(decode_batch(np.asarray(y, dtype=float)[None, :], cb)[0])


def reconstruct(y, u_hat, coeffs: SchemeCoefficients) -> np.ndarray:
    """Second-phase linear estimate ``u_hat + (gamma/alpha) * (y - (alpha+beta) u_hat)``."""
    if not coeffs.alpha > 0:
        raise ParameterError("reconstruction needs alpha > 0 (rho must stay below capacity)")
    y = np.asarray(y, dtype=float)
    u_hat = np.asarray(u_hat, dtype=float)
    a, b = coeffs.alpha, coeffs.beta
    return u_hat + (coeffs.gamma / a) * (y - (a + b) * u_hat)


def transmit_block(s, params: SystemParams, coeffs: SchemeCoefficients, cb: Codebook, rng, genie: bool = False):
    """Run one block through encode, channel, decode and reconstruct.

    With ``genie=True`` the reconstructor is handed the transmitted codeword
    (zero on encoder failure) instead of the decoder's guess.
    """
    s = np.asarray(s, dtype=float)
    n = cb.n
    x, rec = encode(s, coeffs, cb, rng, params.angle_tolerance)
    u_star = selected_codewords(cb, np.array([rec.chosen_index]))[0]
    y = awgn(x, params.N, rng)
    if genie:
        dec, u_hat = rec.chosen_index, u_star
    else:
        dec = decode_codeword(y, cb)
        u_hat = cb.codewords[dec]
    s_hat = reconstruct(y, u_hat, coeffs)
    meta = TrialMeta(
        chosen_index=rec.chosen_index,
        decoded_index=dec,
        encode_failed=rec.encode_failed,
        block_power=rec.block_power,
        quant_error=float(np.sum((s - u_star) ** 2)) / n,
        sq_error=float(np.sum((s - s_hat) ** 2)) / n,
    )
    return s_hat, meta
