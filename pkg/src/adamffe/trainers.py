"""Tap training: full-batch Adam and plain gradient descent, serial LMS and RLS.

Batch trainers work on a materialized :class:`TrainingSet`. Serial trainers
stream one regressor per received sample with zero history, so a run over M
samples makes exactly M coefficient updates per pass.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from adamffe.equalizer import TrainingSet, build_training_set, cost_and_gradient
from adamffe.errors import DivergenceError, NumericFault

DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class AdamState:
    """Iteration counter, moment estimates and hyperparameters of Adam."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    theta: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def zeros(cls, n_taps: int, **hyper) -> "AdamState":
        return cls(np.zeros(n_taps), np.zeros(n_taps), **hyper)


@dataclass
class TrainReport:
    """Outcome of one training run.

    ``mse_trace`` holds the batch cost J at the start of each iteration for
    batch trainers, and the squared a-priori error of each sample for serial
    trainers.
    """

    algorithm: str
    final_taps: np.ndarray
    mse_trace: np.ndarray
    iterations_run: int
    update_count: int
    hyperparameters: dict = field(default_factory=dict)


def adam_step(state: AdamState, w, G) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update of the taps ``w`` with gradient ``G``."""
    w = np.asarray(w, dtype=float)
    G = np.asarray(G, dtype=float)
    if G.shape != w.shape or state.m.shape != w.shape:
        raise ValueError("gradient, taps and moment vectors must have equal length")
    t = state.t + 1
    if not np.all(np.isfinite(G)):
        raise NumericFault("non-finite gradient", iteration=t)
    m = state.beta1 * state.m + (1.0 - state.beta1) * G
    v = state.beta2 * state.v + (1.0 - state.beta2) * G * G
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    w_new = w - state.theta * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return replace(state, m=m, v=v, t=t), w_new


def _init_taps(ts: TrainingSet, init) -> np.ndarray:
    if init is None:
        return np.zeros(ts.N)
    w = np.array(init, dtype=float).ravel()
    if w.size != ts.N:
        raise ValueError(f"initial taps have length {w.size}, expected {ts.N}")
    return w


def train_adam(ts: TrainingSet, init=None, *, theta: float = 0.01, beta1: float = 0.9,
               beta2: float = 0.999, epsilon: float = 1e-8, iterations: int = 120,
               workers: int = 1) -> TrainReport:
    """Full-batch Adam on the MSE cost, starting from zero taps by default.

    ``mse_trace[t - 1]`` is J evaluated at the taps the t-th gradient is taken
    at, so the first entry is the cost at initialization.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    w = _init_taps(ts, init)
    state = AdamState.zeros(ts.N, theta=theta, beta1=beta1, beta2=beta2, epsilon=epsilon)
    trace = np.empty(iterations)
    for i in range(iterations):
        trace[i], G = cost_and_gradient(ts, w, workers)
        state, w = adam_step(state, w, G)
    return TrainReport("adam", w, trace, iterations, iterations,
                       dict(theta=theta, beta1=beta1, beta2=beta2, epsilon=epsilon,
                            iterations=iterations))


def train_bgd(ts: TrainingSet, init=None, *, theta: float = 0.01, iterations: int = 120,
              workers: int = 1) -> TrainReport:
    """Plain batch gradient descent with a fixed step ``theta`` in (0, 1).

    Raises
    ------
    DivergenceError
        If the cost exceeds 1e6 times its initial value or stops being finite.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    w = _init_taps(ts, init)
    trace = np.empty(iterations)
    for i in range(iterations):
        J, G = cost_and_gradient(ts, w, workers)
        if not np.isfinite(J) or (i and J > DIVERGENCE_FACTOR * trace[0]):
            raise DivergenceError(f"cost {J:.3e} vs initial {trace[0]:.3e}", iteration=i + 1)
        trace[i] = J
        w = w - theta * G
    return TrainReport("bgd", w, trace, iterations, iterations,
                       dict(theta=theta, iterations=iterations))


def _serial_set(received, transmitted, N, offset) -> TrainingSet:
    return build_training_set(received, transmitted, N, offset, zero_history=True)


def _error_scale(ts: TrainingSet) -> float:
    # a-priori error magnitude at zero taps
    scale = float(np.max(np.abs(ts.Y))) if ts.rows else 0.0
    return scale if scale > 0 else 1.0


def train_lms(received, transmitted, N: int, mu: float = 1e-3, passes: int = 1,
              offset: int = 0, init=None) -> TrainReport:
    """Serial LMS: ``e = y - r w``, ``w <- w + mu e r`` for every sample."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    if passes < 1:
        raise ValueError("passes must be >= 1")
    ts = _serial_set(received, transmitted, N, offset)
    w = _init_taps(ts, init)
    limit = DIVERGENCE_FACTOR * _error_scale(ts)
    trace = np.empty(ts.rows * passes)
    i = 0
    for _ in range(passes):
        for r, y in zip(ts.R, ts.Y):
            e = y - r @ w
            if not abs(e) <= limit:
                raise DivergenceError(f"error magnitude {abs(e):.3e} exceeds guard",
                                      iteration=i + 1)
            w = w + mu * e * r
            trace[i] = e * e
            i += 1
    return TrainReport("lms", w, trace, i, i, dict(mu=mu, passes=passes))


def train_rls(received, transmitted, N: int, lam: float = 0.999, delta: float = 100.0,
              offset: int = 0, init=None) -> TrainReport:
    """Exponentially weighted RLS with inverse-correlation start ``P = delta * I``."""
    if not 0.0 < lam <= 1.0:
        raise ValueError("forgetting factor must lie in (0, 1]")
    if delta <= 0:
        raise ValueError("delta must be positive")
    ts = _serial_set(received, transmitted, N, offset)
    w = _init_taps(ts, init)
    P = delta * np.eye(N)
    trace = np.empty(ts.rows)
    with np.errstate(over="ignore", invalid="ignore"):
        for i, (r, y) in enumerate(zip(ts.R, ts.Y)):
            Pr = P @ r
            k = Pr / (lam + r @ Pr)
            e = y - r @ w
            w = w + k * e
            P = (P - np.outer(k, Pr)) / lam
            if not np.all(np.isfinite(P)):
                raise NumericFault("non-finite inverse correlation matrix", iteration=i + 1)
            trace[i] = e * e
    return TrainReport("rls", w, trace, ts.rows, ts.rows, dict(lam=lam, delta=delta))
