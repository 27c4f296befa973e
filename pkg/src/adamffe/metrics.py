"""Bit error rate, training complexity counts and frame net rate.

Complexity counts are the closed-form operation counts per training run,
evaluated in exact integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Hard-decision threshold for 7% overhead FEC; a convention, not a measured value.
FEC_LIMIT_7PCT = 3.8e-3

RUN_MODE = {"bgd_adam": "Parallel", "lms": "Serial", "rls": "Serial"}


@dataclass(frozen=True)
class BerReport:
    bit_errors: int
    bits_compared: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_compared

    def below_fec_limit(self, limit: float = FEC_LIMIT_7PCT) -> bool:
        return self.ber < limit


@dataclass(frozen=True)
class ComplexityReport:
    algorithm: str
    M: int
    N: int
    operations: int
    I: int | None = None

    @property
    def run_mode(self) -> str:
        return RUN_MODE[self.algorithm]


def ber(tx, rx) -> BerReport:
    tx = np.asarray(tx).ravel()
    rx = np.asarray(rx).ravel()
    if tx.size != rx.size:
        raise ValueError(f"bit streams differ in length ({tx.size} vs {rx.size})")
    if tx.size == 0:
        raise ValueError("cannot compute BER of empty bit streams")
    return BerReport(int(np.count_nonzero(tx != rx)), int(tx.size))


def _require_int(**kw):
    for name, value in kw.items():
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise TypeError(f"{name} must be an integer, got {value!r}")


def complexity_adam(M: int, N: int, I: int) -> ComplexityReport:
    """``N * (2 (M - N + 1) + 9) * I`` operations."""
    _require_int(M=M, N=N, I=I)
    if N < 1 or M <= N:
        raise ValueError(f"need M > N >= 1 (got M={M}, N={N})")
    if I < 1:
        raise ValueError("iteration count I must be >= 1")
    M, N, I = int(M), int(N), int(I)
    return ComplexityReport("bgd_adam", M, N, N * (2 * (M - N + 1) + 9) * I, I)


def complexity_lms(M: int, N: int) -> ComplexityReport:
    """``(2N + 1) * M`` operations."""
    _require_int(M=M, N=N)
    if M < 1 or N < 1:
        raise ValueError(f"need M, N >= 1 (got M={M}, N={N})")
    M, N = int(M), int(N)
    return ComplexityReport("lms", M, N, (2 * N + 1) * M)


def complexity_rls(M: int, N: int) -> ComplexityReport:
    """``(3N^2 + 5N + 2) * M`` operations."""
    _require_int(M=M, N=N)
    if M < 1 or N < 1:
        raise ValueError(f"need M, N >= 1 (got M={M}, N={N})")
    M, N = int(M), int(N)
    return ComplexityReport("rls", M, N, (3 * N * N + 5 * N + 2) * M)


def net_rate(bits_per_symbol: int, baud: float, payload: int, frame: int,
             fec_overhead: float) -> float:
    """Net bit rate after training overhead and FEC overhead."""
    if payload > frame:
        raise ValueError("payload cannot exceed the frame length")
    if frame <= 0 or payload < 0:
        raise ValueError("frame must be positive and payload non-negative")
    if fec_overhead < 0:
        raise ValueError("FEC overhead must be non-negative")
    return bits_per_symbol * baud * (payload / frame) / (1.0 + fec_overhead)
