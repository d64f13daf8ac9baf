"""System parameters and the error types shared by every module."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

MAX_CODEBOOK_SIZE = 2**31


class ParameterError(ValueError):
    """A scheme constant is outside its admissible range."""


class DomainError(ValueError):
    """An operation was applied to an input outside its mathematical domain."""


class UsageError(ValueError):
    """Arguments are individually valid but inconsistent with each other."""


class ResourceError(RuntimeError):
    """A requested object is too large to build at desk scale."""


def capacity_bits(P: float, N: float) -> float:
    if not (P > 0 and N > 0):
        raise ParameterError(f"capacity needs P > 0 and N > 0, got P={P!r}, N={N!r}")
    return 0.5 * math.log2(1.0 + P / N)


def codebook_size(n: int, rho: float) -> int:
    """Number of codewords ``ceil(2**(n*rho))``.

    Exponents within 1e-9 of an integer are snapped so that e.g. ``30 * 0.1``
    gives 8 codewords rather than 9.
    """
    e = n * rho
    if abs(e - round(e)) < 1e-9:
        e = round(e)
        if e > 62:
            raise ResourceError(f"codebook of 2**{e} codewords exceeds {MAX_CODEBOOK_SIZE}")
        return 1 << int(e)
    if e > 62:
        raise ResourceError(f"codebook of 2**{e:.6g} codewords exceeds {MAX_CODEBOOK_SIZE}")
    return int(math.ceil(2.0**e))


@dataclass(frozen=True)
class SystemParams:
    """Scheme constants plus the simulator knobs.

    ``epsilon=None`` selects the default angle tolerance ``0.5 / sqrt(n)``.
    ``delta`` shrinks the codeword sphere radius by the factor ``1 - delta``.
    """

    sigma2: float
    P: float
    N: float
    rho: float
    n: int
    epsilon: float | None = None
    delta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("sigma2", "P", "N"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be a finite number > 0, got {v!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.rho) and self.rho >= 0):
            raise ParameterError(f"rho must be >= 0, got {self.rho!r}")
        C = capacity_bits(self.P, self.N)
        if self.rho >= C:
            raise ParameterError(
                f"rho={self.rho!r} must be strictly below the capacity C={C:.9g} bits"
            )
        if self.epsilon is not None and not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if not (0.0 <= self.delta < 1.0):
            raise ParameterError(f"delta must lie in [0, 1), got {self.delta!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise ParameterError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        M = codebook_size(self.n, self.rho)
        if M > MAX_CODEBOOK_SIZE:
            raise ResourceError(f"codebook size {M} exceeds {MAX_CODEBOOK_SIZE} (n={self.n}, rho={self.rho})")

    @property
    def capacity(self) -> float:
        return capacity_bits(self.P, self.N)

    @property
    def M(self) -> int:
        return codebook_size(self.n, self.rho)

    @property
    def angle_tolerance(self) -> float:
        if self.epsilon is None:
            return default_epsilon(self.n)
        return self.epsilon

    def to_dict(self) -> dict:
        return asdict(self)


def default_epsilon(n: int) -> float:
    return 0.5 / math.sqrt(n)
