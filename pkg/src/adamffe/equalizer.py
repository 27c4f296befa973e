"""Feed-forward equalizer core: training matrix, MSE cost, gradient, LS oracle.

Index convention: ``received[k]`` is x_{k+1}. Row ``r`` of the training
matrix is the newest-first window ``[x_{N+r}, x_{N+r-1}, ..., x_{r+1}]`` and
its target is the transmitted symbol ``offset`` samples before the newest
sample in that window.

Cost and gradient are accumulated over fixed blocks of rows and summed in
block order, so results are bit-identical for any ``workers`` count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from adamffe.errors import SingularityError

BLOCK_ROWS = 64
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class TrainingSet:
    """Toeplitz training matrix ``R`` and target vector ``Y``."""

    R: np.ndarray
    Y: np.ndarray

    @property
    def rows(self) -> int:
        return self.R.shape[0]

    @property
    def N(self) -> int:
        return self.R.shape[1]

    @property
    def M(self) -> int:
        return self.rows + self.N - 1


def build_training_set(received, transmitted, N: int, offset: int = 0,
                       zero_history: bool = False) -> TrainingSet:
    """Stack sliding windows of ``received`` into the training matrix.

    Parameters
    ----------
    received : array_like
        The M received training samples x_1..x_M.
    transmitted : array_like
        Known transmitted symbols, index-aligned with ``received``.
    N : int
        Number of equalizer taps.
    offset : int
        Target lag: row ``r`` targets ``transmitted[N - 1 + r - offset]``.
    zero_history : bool
        Prepend ``N - 1`` zeros to both sequences so there is one row per
        received sample (the regressors a serial trainer sees). Targets before
        the first transmitted symbol are zero.

    Returns
    -------
    TrainingSet
        ``(M - N + 1) x N`` matrix (``M x N`` with ``zero_history``).
    """
    x = np.asarray(received, dtype=float).ravel()
    y = np.asarray(transmitted, dtype=float).ravel()
    if N < 1:
        raise ValueError("tap count N must be >= 1")
    if offset < 0:
        raise ValueError("offset must be >= 0")
    if zero_history:
        pad = np.zeros(N - 1)
        x = np.concatenate([pad, x])
        y = np.concatenate([pad, y])
        if offset > N - 1:
            raise ValueError(f"offset {offset} exceeds N - 1 = {N - 1}")
    if x.size < N:
        raise ValueError(f"need at least N={N} received samples, got {x.size}")
    rows = x.size - N + 1
    first, last = N - 1 - offset, x.size - 1 - offset
    if first < 0 or last >= y.size:
        raise ValueError(
            f"offset {offset} puts targets outside the transmitted sequence "
            f"(indices {first}..{last}, length {y.size})")
    R = np.ascontiguousarray(sliding_window_view(x, N)[:, ::-1])
    Y = y[first:first + rows].copy()
    return TrainingSet(R, Y)


def _check_taps(ts: TrainingSet, w) -> np.ndarray:
    w = np.asarray(w, dtype=float).ravel()
    if w.size != ts.N:
        raise ValueError(f"tap vector has length {w.size}, training set expects {ts.N}")
    return w


def _blockwise(ts: TrainingSet, w: np.ndarray, workers: int):
    def block(start):
        R = ts.R[start:start + BLOCK_ROWS]
        e = R @ w - ts.Y[start:start + BLOCK_ROWS]
        return e @ e, R.T @ e

    starts = range(0, ts.rows, BLOCK_ROWS)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, starts))
    else:
        parts = [block(s) for s in starts]
    sq, grad = parts[0][0], parts[0][1].copy()
    for s, g in parts[1:]:
        sq += s
        grad += g
    return float(sq), grad


def cost_and_gradient(ts: TrainingSet, w, workers: int = 1) -> tuple[float, np.ndarray]:
    """``(J(w), dJ/dw)`` from one pass over the residual."""
    w = _check_taps(ts, w)
    sq, grad = _blockwise(ts, w, workers)
    return sq / ts.rows, (2.0 / ts.rows) * grad


def mse_cost(ts: TrainingSet, w, workers: int = 1) -> float:
    """Mean square training error ``|Rw - Y|^2 / (M - N + 1)``."""
    return cost_and_gradient(ts, w, workers)[0]


def gradient(ts: TrainingSet, w, workers: int = 1) -> np.ndarray:
    """Gradient of the MSE cost: ``2/(M - N + 1) * R^T (Rw - Y)``."""
    return cost_and_gradient(ts, w, workers)[1]


def closed_form_solution(ts: TrainingSet) -> np.ndarray:
    """Least-squares taps ``(R^T R)^-1 R^T Y``.

    Raises
    ------
    SingularityError
        When the condition estimate of ``R^T R`` exceeds 1e12.
    """
    cond = float(np.linalg.cond(ts.R)) ** 2
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularityError(cond)
    w, *_ = np.linalg.lstsq(ts.R, ts.Y, rcond=None)
    return w


def equalize(received, w) -> np.ndarray:
    """Filter ``received`` with taps ``w`` (zero history); same length as input."""
    x = np.asarray(received, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    if x.size == 0:
        return x.copy()
    return np.convolve(x, w)[: x.size]
