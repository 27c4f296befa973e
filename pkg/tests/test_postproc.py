import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adamffe.pam import build_alphabet, demap_symbols
from adamffe.postproc import mlsd, path_metric, post_filter, scan_alpha

finite = st.floats(-10, 10, allow_nan=False)


def brute_force(z, alpha, alphabet):
    best, best_metric = None, np.inf
    for seq in itertools.product(alphabet.amplitudes, repeat=len(z)):
        m = path_metric(z, np.array(seq), alpha)
        if m < best_metric:
            best, best_metric = np.array(seq), m
    return best, best_metric


def test_post_filter_examples():
    np.testing.assert_allclose(post_filter([1, 1, 1], 0.5), [1, 1.5, 1.5])
    np.testing.assert_allclose(post_filter([1, -1, 1, -1], 1.0), [1, 0, 0, 0])


def test_post_filter_alpha_zero_is_identity(rng):
    s = rng.standard_normal(50)
    np.testing.assert_array_equal(post_filter(s, 0.0), s)


@given(arrays(float, 20, elements=finite), arrays(float, 20, elements=finite),
       finite, st.floats(-1, 1))
def test_post_filter_is_linear(a, b, c, alpha):
    np.testing.assert_allclose(post_filter(a + c * b, alpha),
                               post_filter(a, alpha) + c * post_filter(b, alpha), atol=1e-9)


@given(arrays(float, 20, elements=finite), st.floats(-1, 1))
def test_post_filter_is_shift_invariant(s, alpha):
    shifted = np.concatenate([[0.0], s[:-1]])
    np.testing.assert_allclose(post_filter(shifted, alpha)[1:], post_filter(s, alpha)[:-1])


@pytest.mark.parametrize("levels,alpha,max_len", [(2, 0.5, 8), (4, 0.7, 6)])
def test_mlsd_matches_brute_force(levels, alpha, max_len):
    alphabet = build_alphabet(levels)
    rng = np.random.default_rng(levels)
    for _ in range(200):
        K = int(rng.integers(1, max_len + 1))
        a = rng.choice(alphabet.amplitudes, K)
        z = post_filter(a, alpha) + 0.4 * rng.standard_normal(K)
        expected, _ = brute_force(z, alpha, alphabet)
        np.testing.assert_array_equal(mlsd(z, alpha, alphabet), expected)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 4, 8, 16]), st.floats(0, 1), st.integers(1, 200), st.integers(0, 2**31))
def test_noiseless_roundtrip_is_exact(levels, alpha, K, seed):
    alphabet = build_alphabet(levels)
    a = np.random.default_rng(seed).choice(alphabet.amplitudes, K)
    np.testing.assert_array_equal(mlsd(post_filter(a, alpha), alpha, alphabet), a)


def test_mlsd_metric_never_exceeds_witness(rng):
    alphabet = build_alphabet(8)
    for _ in range(50):
        a = rng.choice(alphabet.amplitudes, 40)
        z = post_filter(a, 0.5) + 0.3 * rng.standard_normal(40)
        decided = mlsd(z, 0.5, alphabet)
        assert path_metric(z, decided, 0.5) <= path_metric(z, a, 0.5) + 1e-12


def test_mlsd_empty_input():
    assert mlsd([], 0.5, build_alphabet(4)).size == 0


def test_scan_alpha_zero_is_hard_decision(rng):
    alphabet = build_alphabet(4)
    truth = rng.choice(alphabet.amplitudes, 500)
    s = truth + 0.4 * rng.standard_normal(500)
    [(alpha, b)] = scan_alpha(s, truth, alphabet, [0.0])
    hard = np.mean(demap_symbols(s, alphabet) != demap_symbols(truth, alphabet))
    assert alpha == 0.0 and b == pytest.approx(hard)


def test_scan_alpha_noiseless_gives_zero(rng):
    alphabet = build_alphabet(8)
    truth = rng.choice(alphabet.amplitudes, 200)
    assert all(b == 0 for _, b in scan_alpha(truth, truth, alphabet, [0.0, 0.3, 0.6]))


def test_scan_alpha_rejects_empty_grid():
    alphabet = build_alphabet(2)
    with pytest.raises(ValueError):
        scan_alpha([1.0], [1.0], alphabet, [])
