"""Closed-form quantities of the superimposed coded/uncoded scheme.

All rates are in bits; all distortions and powers are per-symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import ParameterError, SystemParams, capacity_bits

RADICAND_CLAMP = 1e-12


def capacity(P: float, N: float) -> float:
    """AWGN capacity ``0.5 * log2(1 + P/N)`` in bits per channel use."""
    return capacity_bits(P, N)


def distortion_rate(sigma2: float, R: float) -> float:
    """Gaussian distortion-rate function ``sigma2 * 2**(-2R)``."""
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 must be > 0, got {sigma2!r}")
    if not R >= 0:
        raise ParameterError(f"rate must be >= 0, got {R!r}")
    return sigma2 * 2.0 ** (-2.0 * R)


def optimal_distortion(sigma2: float, P: float, N: float) -> float:
    """Smallest achievable MSE, ``sigma2 * N / (P + N)``."""
    for name, v in (("sigma2", sigma2), ("P", P), ("N", N)):
        if not v > 0:
            raise ParameterError(f"{name} must be > 0, got {v!r}")
    return sigma2 * N / (P + N)


@dataclass(frozen=True)
class SchemeCoefficients:
    """Derived constants of the scheme for one parameter set.

    ``target_cos`` is the cosine at which a codeword on the (possibly shrunk)
    sphere is orthogonal to its quantization error, ``sqrt(radius2/sigma2)``.
    """

    alpha: float
    beta: float
    Delta: float
    gamma: float
    radius2: float
    rho: float
    target_cos: float


def coefficients(params: SystemParams) -> SchemeCoefficients:
    sigma2, P, N, rho = params.sigma2, params.P, params.N, params.rho
    C = capacity_bits(P, N)
    if rho >= C:
        raise ParameterError(f"rho={rho!r} must be strictly below the capacity C={C:.9g} bits")
    shrink = 2.0 ** (-2.0 * rho)
    radicand = (shrink * (N + P) - N) / (sigma2 * shrink)
    if radicand < 0:
        if radicand < -RADICAND_CLAMP:
            raise ParameterError(f"alpha radicand {radicand!r} is negative; rho too close to C={C:.9g}")
        radicand = 0.0
    alpha = math.sqrt(radicand)
    beta = math.sqrt((P + N) / sigma2) - alpha
    Delta = sigma2 * shrink
    gamma = alpha * alpha * Delta / (alpha * alpha * Delta + N)
    radius2 = sigma2 * (1.0 - shrink) * (1.0 - params.delta) ** 2
    return SchemeCoefficients(
        alpha=alpha,
        beta=beta,
        Delta=Delta,
        gamma=gamma,
        radius2=radius2,
        rho=rho,
        target_cos=math.sqrt(radius2 / sigma2),
    )


def effective_decode_snr(coeffs: SchemeCoefficients, sigma2: float, N: float) -> float:
    """SNR seen by the codeword decoder when quantization noise is treated as Gaussian.

    Signal ``(alpha+beta)**2 * (sigma2 - Delta)`` over noise ``alpha**2 * Delta + N``.
    With an unshrunk sphere this equals ``2**(2*rho) - 1``.
    """
    a, b, D = coeffs.alpha, coeffs.beta, coeffs.Delta
    return (a + b) ** 2 * (sigma2 - D) / (a * a * D + N)


def predicted_genie_distortion(coeffs: SchemeCoefficients, N: float) -> float:
    """MSE of the second-phase estimator given the true codeword: ``Delta*N/(alpha**2*Delta + N)``."""
    if not coeffs.alpha > 0:
        raise ParameterError("predicted genie distortion needs alpha > 0 (rho < C)")
    a2D = coeffs.alpha**2 * coeffs.Delta
    return coeffs.Delta * N / (a2D + N)


def power_identity_residual(coeffs: SchemeCoefficients, sigma2: float, P: float) -> float:
    """``(alpha+beta)**2 sigma2 (1-2**(-2rho)) + alpha**2 sigma2 2**(-2rho) - P``."""
    a, b, D = coeffs.alpha, coeffs.beta, coeffs.Delta
    return (a + b) ** 2 * (sigma2 - D) + a * a * D - P


def theory_table(params: SystemParams) -> dict:
    """Reference values attached to every simulation report."""
    co = coefficients(params)
    C = capacity_bits(params.P, params.N)
    out = {
        "C": C,
        "D_rho": distortion_rate(params.sigma2, params.rho),
        "D_star": optimal_distortion(params.sigma2, params.P, params.N),
        "alpha": co.alpha,
        "beta": co.beta,
        "gamma": co.gamma,
        "Delta": co.Delta,
        "radius2": co.radius2,
        "effective_snr": effective_decode_snr(co, params.sigma2, params.N),
    }
    out["predicted_genie_distortion"] = (
        predicted_genie_distortion(co, params.N) if co.alpha > 0 else None
    )
    return out
