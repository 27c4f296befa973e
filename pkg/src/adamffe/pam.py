"""PAM-M alphabets, Gray bit mapping and payload generation.

Sequences are plain 1-D numpy arrays: bit streams are ``uint8`` arrays of
0/1 values and symbol sequences are ``float64`` amplitude arrays. The
alphabet travels alongside them as a separate argument.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SUPPORTED_LEVELS = (2, 4, 8, 16)


@dataclass(frozen=True)
class PamAlphabet:
    """Gray-labelled PAM alphabet.

    Attributes
    ----------
    levels_count : int
        Number of amplitude levels.
    amplitudes : np.ndarray
        Strictly increasing amplitudes, already divided by ``scale``.
    bit_labels : np.ndarray
        ``(levels_count, bits_per_symbol)`` array; row ``i`` labels
        ``amplitudes[i]``, most significant bit first.
    scale : float
        Divisor applied to the odd-integer grid ``{±1, ±3, ...}``; 1.0 when
        the alphabet is not normalized.
    """

    levels_count: int
    amplitudes: np.ndarray
    bit_labels: np.ndarray
    scale: float

    @property
    def bits_per_symbol(self) -> int:
        return self.levels_count.bit_length() - 1

    @property
    def thresholds(self) -> np.ndarray:
        """Midpoints between adjacent amplitudes (decision boundaries)."""
        return 0.5 * (self.amplitudes[:-1] + self.amplitudes[1:])

    def quantize_index(self, samples) -> np.ndarray:
        """Index of the nearest amplitude; exact midpoints go to the lower level."""
        samples = np.asarray(samples, dtype=float)
        return np.searchsorted(self.thresholds, samples, side="left")

    def quantize(self, samples) -> np.ndarray:
        return self.amplitudes[self.quantize_index(samples)]


def _gray_labels(levels_count: int) -> np.ndarray:
    nbits = levels_count.bit_length() - 1
    codes = np.arange(levels_count)
    gray = codes ^ (codes >> 1)
    shifts = np.arange(nbits - 1, -1, -1)
    return ((gray[:, None] >> shifts) & 1).astype(np.uint8)


def build_alphabet(levels_count: int, normalize: bool = True) -> PamAlphabet:
    """Build a zero-mean, Gray-labelled PAM alphabet.

    Parameters
    ----------
    levels_count : int
        One of 2, 4, 8 or 16.
    normalize : bool
        Scale amplitudes to unit mean-square power.

    Raises
    ------
    ValueError
        If ``levels_count`` is not a supported power of two.
    """
    if not isinstance(levels_count, (int, np.integer)) or isinstance(levels_count, bool) \
            or levels_count not in SUPPORTED_LEVELS:
        raise ValueError(f"unsupported PAM order {levels_count!r}; "
                         f"expected one of {SUPPORTED_LEVELS}")
    levels_count = int(levels_count)
    grid = np.arange(-(levels_count - 1), levels_count, 2, dtype=float)
    scale = float(np.sqrt(np.mean(grid**2))) if normalize else 1.0
    return PamAlphabet(levels_count, grid / scale, _gray_labels(levels_count), scale)


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits).astype(np.uint8, copy=False).ravel()
    if arr.size and arr.max() > 1:
        raise ValueError("bit stream may only contain 0 and 1")
    return arr


def map_bits(bits, alphabet: PamAlphabet) -> np.ndarray:
    """Map groups of ``bits_per_symbol`` bits (MSB first) to amplitudes."""
    bits = _as_bits(bits)
    k = alphabet.bits_per_symbol
    if bits.size % k:
        raise ValueError(f"bit count {bits.size} is not a multiple of {k} bits per symbol")
    groups = bits.reshape(-1, k)
    weights = 1 << np.arange(k - 1, -1, -1)
    gray = groups @ weights
    # inverse Gray: the level index whose Gray code equals each group
    lookup = np.empty(alphabet.levels_count, dtype=np.intp)
    lookup[alphabet.bit_labels @ weights] = np.arange(alphabet.levels_count)
    return alphabet.amplitudes[lookup[gray]]


def demap_symbols(received, alphabet: PamAlphabet) -> np.ndarray:
    """Hard-decide each sample to the nearest level and emit its bit label."""
    idx = alphabet.quantize_index(np.asarray(received, dtype=float).ravel())
    return alphabet.bit_labels[idx].reshape(-1)


def generate_payload(length: int, seed: int) -> np.ndarray:
    """Deterministic pseudo-random bits for a given ``(length, seed)``."""
    if length < 0:
        raise ValueError("payload length must be non-negative")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=length, dtype=np.uint8)
