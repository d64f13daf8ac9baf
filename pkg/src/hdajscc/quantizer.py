"""Random spherical codebooks and typical-angle quantization."""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .params import MAX_CODEBOOK_SIZE, DomainError, ParameterError, ResourceError, UsageError, codebook_size

FAILURE = -1

# Caps the codebook matrix (M * n float64 entries, 4 GiB) and the scratch
# matrices used when scoring a batch of blocks against the codebook.
MAX_CODEBOOK_ELEMENTS = 2**29
SCORE_BUDGET = 2**23


@dataclass(frozen=True, eq=False)
class Codebook:
    n: int
    M: int
    radius2: float
    codewords: np.ndarray  # (M, n), read-only

    @property
    def norm(self) -> float:
        """Common Euclidean norm of every codeword."""
        return math.sqrt(self.n * self.radius2)

    def __eq__(self, other):
        if not isinstance(other, Codebook):
            return NotImplemented
        return (
            self.n == other.n
            and self.M == other.M
            and self.radius2 == other.radius2
            and np.array_equal(self.codewords, other.codewords)
        )

    __hash__ = None

    def save(self, path):
        """Write as CSV (``.csv``) or flat little-endian binary (anything else).

        Both formats carry an ``n, M, radius2`` header followed by the
        codewords in row-major order.
        """
        path = Path(path)
        if path.suffix.lower() == ".csv":
            with path.open("w", newline="") as f:
                w = csv.writer(f)
                w.writerow(["n", "M", "radius2"])
                w.writerow([self.n, self.M, repr(self.radius2)])
                for row in self.codewords:
                    w.writerow([repr(float(v)) for v in row])
        else:
            with path.open("wb") as f:
                f.write(struct.pack("<qqd", self.n, self.M, self.radius2))
                f.write(np.ascontiguousarray(self.codewords, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "Codebook":
        path = Path(path)
        if path.suffix.lower() == ".csv":
            with path.open(newline="") as f:
                rows = list(csv.reader(f))
            n, M, radius2 = int(rows[1][0]), int(rows[1][1]), float(rows[1][2])
            cw = np.array([[float(v) for v in r] for r in rows[2:]], dtype=float).reshape(M, n)
        else:
            raw = path.read_bytes()
            n, M, radius2 = struct.unpack_from("<qqd", raw)
            cw = np.frombuffer(raw, dtype="<f8", offset=24).reshape(M, n).astype(float)
        cw.setflags(write=False)
        return cls(n=n, M=M, radius2=radius2, codewords=cw)


@dataclass(frozen=True)
class QuantizeOutcome:
    index: int
    candidates: int

    @property
    def failed(self) -> bool:
        return self.index == FAILURE


def build_codebook(n: int, rho: float, radius2: float, rng: np.random.Generator) -> Codebook:
    """Draw ``ceil(2**(n*rho))`` codewords i.i.d. uniform on the sphere of norm ``sqrt(n*radius2)``.

    A zero radius gives the single all-zero codeword and consumes no randomness.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if rho < 0 or radius2 < 0:
        raise ParameterError(f"rho and radius2 must be >= 0, got rho={rho}, radius2={radius2}")
    if radius2 == 0:
        cw = np.zeros((1, n))
        cw.setflags(write=False)
        return Codebook(n=n, M=1, radius2=0.0, codewords=cw)
    M = codebook_size(n, rho)
    if M > MAX_CODEBOOK_SIZE:
        raise ResourceError(f"codebook size {M} exceeds {MAX_CODEBOOK_SIZE}")
    if M * n > MAX_CODEBOOK_ELEMENTS:
        raise ResourceError(f"codebook of {M} x {n} entries exceeds the memory cap of {MAX_CODEBOOK_ELEMENTS}")
    g = rng.standard_normal((M, n))
    g *= math.sqrt(n * radius2) / np.linalg.norm(g, axis=1, keepdims=True)
    g.setflags(write=False)
    return Codebook(n=n, M=M, radius2=float(radius2), codewords=g)


def cosine(s, u) -> float:
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    ns, nu = np.linalg.norm(s), np.linalg.norm(u)
    if ns == 0 or nu == 0:
        raise DomainError("cosine is undefined for a zero-norm vector")
    return float(np.clip(np.dot(s, u) / (ns * nu), -1.0, 1.0))


def _row_slices(rows: int, M: int):
    step = max(1, SCORE_BUDGET // max(M, 1))
    for lo in range(0, rows, step):
        yield slice(lo, min(rows, lo + step))


def quantize_batch(S, cb: Codebook, target_cos: float, epsilon: float, rng: np.random.Generator):
    """Typical-angle quantization of each row of ``S``.

    Returns ``(index, candidates)`` integer arrays. Rows are processed in
    order and each row with a nonempty candidate set consumes exactly one
    ``rng.integers`` draw, so results do not depend on how rows are batched.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.shape[1] != cb.n:
        raise UsageError(f"block length {S.shape[1]} does not match codebook n={cb.n}")
    if epsilon < 0:
        raise ParameterError(f"epsilon must be >= 0, got {epsilon}")
    T = S.shape[0]
    if cb.radius2 == 0:
        return np.zeros(T, dtype=np.int64), np.ones(T, dtype=np.int64)
    norms = np.linalg.norm(S, axis=1)
    if np.any(norms == 0):
        raise DomainError("cannot quantize a zero-norm source block on a nonzero sphere")
    # band on raw inner products: (t-eps)|s||u| <= <s,u> <= (t+eps)|s||u|;
    # an edge at or past +-1 is open, matching a cosine clamped to [-1, 1]
    lo = target_cos - epsilon if target_cos - epsilon > -1.0 else -np.inf
    hi = target_cos + epsilon if target_cos + epsilon < 1.0 else np.inf
    scale = norms * cb.norm
    index = np.full(T, FAILURE, dtype=np.int64)
    count = np.zeros(T, dtype=np.int64)
    for sl in _row_slices(T, cb.M):
        G = S[sl] @ cb.codewords.T
        k = scale[sl, None]
        inside = (G >= lo * k) & (G <= hi * k)
        for r, row in enumerate(inside, start=sl.start):
            cand = np.flatnonzero(row)
            count[r] = cand.size
            if cand.size:
                index[r] = cand[rng.integers(cand.size)]
    return index, count


def quantize(s, cb: Codebook, target_cos: float, epsilon: float, rng: np.random.Generator) -> QuantizeOutcome:
    """Pick a codeword uniformly among those whose cosine with ``s`` is within ``epsilon`` of ``target_cos``.

    ``index`` is ``FAILURE`` when no codeword qualifies; the caller then
    transmits the zero codeword.
    """
    idx, cnt = quantize_batch(np.asarray(s, dtype=float)[None, :], cb, target_cos, epsilon, rng)
    return QuantizeOutcome(index=int(idx[0]), candidates=int(cnt[0]))
