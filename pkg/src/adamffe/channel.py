"""Simulated intensity-modulation link: FIR inter-symbol interference plus AWGN.

The link stands in for the DAC/EML/fiber/PD/scope chain. Noise power is set
relative to the signal power measured after the ISI filter, so ``snr_db`` is
the SNR at the receiver input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_ISI_TAPS = (0.2, 1.0, 0.3)


@dataclass(frozen=True)
class ChannelModel:
    """FIR channel with optional pure delay and AWGN.

    ``snr_db=None`` (or ``+inf``) selects the noiseless link.
    """

    isi_taps: tuple[float, ...] = DEFAULT_ISI_TAPS
    snr_db: float | None = None
    seed: int = 0
    delay: int = 0

    def __post_init__(self):
        taps = tuple(float(t) for t in self.isi_taps)
        object.__setattr__(self, "isi_taps", taps)
        if not taps or not any(taps):
            raise ValueError("isi_taps must be non-empty with at least one nonzero tap")
        if not all(math.isfinite(t) for t in taps):
            raise ValueError("isi_taps must be finite")
        if self.snr_db is not None and math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")
        if self.delay < 0:
            raise ValueError("delay must be >= 0")

    @property
    def noiseless(self) -> bool:
        return self.snr_db is None or math.isinf(self.snr_db)


def apply_fir(signal, taps) -> np.ndarray:
    """Causal FIR filtering with zero history, truncated to the input length.

    ``out[k] = sum_j taps[j] * signal[k - j]``.
    """
    signal = np.asarray(signal, dtype=float)
    taps = np.asarray(taps, dtype=float)
    if signal.size == 0 or taps.size == 0:
        raise ValueError("apply_fir needs a non-empty signal and non-empty taps")
    return np.convolve(signal, taps)[: signal.size]


def add_awgn(signal, snr_db: float | None, seed: int,
             signal_power: float | None = None) -> np.ndarray:
    """Add white Gaussian noise at ``snr_db`` relative to the signal power.

    The power defaults to the empirical mean square of ``signal``; pass
    ``signal_power`` to reference a known nominal power instead.
    ``snr_db=None`` or ``inf`` returns an unchanged copy.
    """
    signal = np.asarray(signal, dtype=float)
    if snr_db is None or (math.isinf(snr_db) and snr_db > 0):
        return signal.copy()
    if signal.size == 0:
        raise ValueError("cannot add noise to an empty signal")
    power = float(np.mean(signal**2)) if signal_power is None else float(signal_power)
    if power <= 0.0:
        raise ValueError("signal has zero power; SNR is undefined")
    sigma = math.sqrt(power / 10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    return signal + sigma * rng.standard_normal(signal.size)


def simulate_link(tx, model: ChannelModel, signal_power: float | None = None) -> np.ndarray:
    """Delay-pad, ISI-filter, then add noise. Output length is ``len(tx) + delay``.

    ``signal_power`` is forwarded to :func:`add_awgn`.
    """
    tx = np.asarray(tx, dtype=float)
    if tx.size == 0:
        raise ValueError("transmitted sequence is empty")
    padded = np.concatenate([np.zeros(model.delay), tx])
    filtered = apply_fir(padded, model.isi_taps)
    if model.noiseless:
        return filtered
    return add_awgn(filtered, model.snr_db, model.seed, signal_power)
