"""Superimposed coded and uncoded transmission of a Gaussian source over the AWGN channel."""

from .params import DomainError, ParameterError, ResourceError, SystemParams, UsageError
from .quantizer import FAILURE, Codebook, QuantizeOutcome, build_codebook, cosine, quantize
from .codec import awgn, decode_codeword, encode, reconstruct, transmit_block
from .simulator import RunReport, TrialResult, cross_term_stats, run, sweep
from .theory import (
    SchemeCoefficients,
    capacity,
    coefficients,
    distortion_rate,
    effective_decode_snr,
    optimal_distortion,
    predicted_genie_distortion,
)

__version__ = "0.1.0"
