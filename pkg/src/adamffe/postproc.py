"""Post filter ``z_k = s_k + alpha s_{k-1}`` and Viterbi MLSD for its 1 + alpha D response."""
from __future__ import annotations

import numpy as np

from adamffe.pam import PamAlphabet, demap_symbols


def post_filter(s, alpha: float) -> np.ndarray:
    """Two-tap post filter with zero history (``s_0 = 0``)."""
    s = np.asarray(s, dtype=float).ravel()
    z = s.copy()
    z[1:] += alpha * s[:-1]
    return z


def mlsd(z, alpha: float, alphabet: PamAlphabet) -> np.ndarray:
    """Maximum-likelihood sequence detection over the ``1 + alpha D`` trellis.

    Minimizes ``sum_k (z_k - a_k - alpha a_{k-1})^2`` over amplitude sequences
    with ``a_0 = 0``. The trellis state is the previous symbol; ties resolve to
    the lowest-amplitude state. Full-length traceback.
    """
    z = np.asarray(z, dtype=float).ravel()
    if z.size == 0:
        return z.copy()
    a = alphabet.amplitudes
    L = a.size
    # expected[i, j]: noiseless output for previous level i, current level j
    expected = a[None, :] + alpha * a[:, None]
    cols = np.arange(L)
    back = np.empty((z.size, L), dtype=np.intp)
    metric = (z[0] - a) ** 2
    back[0] = 0
    for k in range(1, z.size):
        d = z[k] - expected
        cand = metric[:, None] + d * d
        best = cand.argmin(axis=0)
        back[k] = best
        metric = cand[best, cols]
    path = np.empty(z.size, dtype=np.intp)
    path[-1] = int(metric.argmin())
    for k in range(z.size - 1, 0, -1):
        path[k - 1] = back[k, path[k]]
    return a[path]


def path_metric(z, symbols, alpha: float) -> float:
    """Squared distance between ``z`` and the post-filtered ``symbols``."""
    z = np.asarray(z, dtype=float).ravel()
    return float(np.sum((z - post_filter(symbols, alpha)) ** 2))


def scan_alpha(s, truth, alphabet: PamAlphabet, grid) -> list[tuple[float, float]]:
    """BER of post filter + MLSD on ``s`` against ``truth`` for every alpha in ``grid``."""
    grid = list(grid)
    if not grid:
        raise ValueError("alpha grid is empty")
    truth_bits = demap_symbols(truth, alphabet)
    out = []
    for alpha in grid:
        decided = mlsd(post_filter(s, alpha), alpha, alphabet)
        errors = np.count_nonzero(demap_symbols(decided, alphabet) != truth_bits)
        out.append((float(alpha), errors / truth_bits.size))
    return out
