import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamffe.pam import SUPPORTED_LEVELS, build_alphabet, demap_symbols, generate_payload, map_bits


def bits(s):
    return np.array([int(c) for c in s.replace(" ", "")], dtype=np.uint8)


def test_pam2_unnormalized():
    a = build_alphabet(2, normalize=False)
    np.testing.assert_array_equal(a.amplitudes, [-1.0, 1.0])
    np.testing.assert_array_equal(a.bit_labels.ravel(), [0, 1])


def test_pam8_gray_table():
    a = build_alphabet(8, normalize=False)
    table = {"".join(map(str, lab)): amp for lab, amp in zip(a.bit_labels, a.amplitudes)}
    assert table == {"000": -7, "001": -5, "011": -3, "010": -1,
                     "110": 1, "111": 3, "101": 5, "100": 7}


def test_pam8_normalized_scale():
    # mean square of {±1, ±3, ±5, ±7} is (1 + 9 + 25 + 49) / 4 = 21
    a = build_alphabet(8, normalize=True)
    assert a.scale == pytest.approx(np.sqrt(21.0), rel=1e-15)
    np.testing.assert_allclose(a.amplitudes * np.sqrt(21.0), np.arange(-7, 8, 2), rtol=1e-14)


@pytest.mark.parametrize("levels", SUPPORTED_LEVELS)
@pytest.mark.parametrize("normalize", [False, True])
def test_alphabet_invariants(levels, normalize):
    a = build_alphabet(levels, normalize)
    amps = a.amplitudes
    assert np.all(np.diff(amps) > 0)
    np.testing.assert_allclose(amps, -amps[::-1], atol=1e-15)
    assert abs(np.mean(amps)) < 1e-15
    if normalize:
        assert abs(np.mean(amps**2) - 1.0) < 1e-12
    labels = {tuple(lab) for lab in a.bit_labels}
    assert len(labels) == levels
    # exhaustive Gray adjacency check
    for lo, hi in zip(a.bit_labels[:-1], a.bit_labels[1:]):
        assert np.count_nonzero(lo != hi) == 1


@pytest.mark.parametrize("levels", [0, 1, 3, 6, 32, 2.0, True])
def test_unsupported_levels(levels):
    with pytest.raises(ValueError):
        build_alphabet(levels)


def test_map_examples():
    pam8 = build_alphabet(8, normalize=False)
    np.testing.assert_array_equal(map_bits(bits("101"), pam8), [5.0])
    pam2 = build_alphabet(2, normalize=False)
    np.testing.assert_array_equal(map_bits(bits("01"), pam2), [-1.0, 1.0])
    assert map_bits(np.array([], dtype=np.uint8), pam8).size == 0


def test_map_indivisible_length():
    with pytest.raises(ValueError):
        map_bits(bits("10"), build_alphabet(8))


def test_map_rejects_non_bits():
    with pytest.raises(ValueError):
        map_bits(np.array([0, 2, 1]), build_alphabet(8))


def test_map_matches_label_table_exhaustively():
    a = build_alphabet(16, normalize=False)
    for lab, amp in zip(a.bit_labels, a.amplitudes):
        assert map_bits(lab, a)[0] == amp


def test_demap_examples():
    pam8 = build_alphabet(8, normalize=False)
    np.testing.assert_array_equal(demap_symbols([4.9], pam8), bits("101"))
    pam2 = build_alphabet(2, normalize=False)
    np.testing.assert_array_equal(demap_symbols([0.0], pam2), [0])


def test_demap_ties_go_to_lower_level():
    a = build_alphabet(8, normalize=True)
    mids = a.thresholds
    np.testing.assert_array_equal(a.quantize_index(mids), np.arange(7))


def test_roundtrip_3000_bits():
    a = build_alphabet(8)
    b = generate_payload(3000, 7)
    np.testing.assert_array_equal(demap_symbols(map_bits(b, a), a), b)


@settings(max_examples=60, deadline=None)
@given(levels=st.sampled_from(SUPPORTED_LEVELS), normalize=st.booleans(),
       nsym=st.integers(0, 200), seed=st.integers(0, 2**32 - 1))
def test_roundtrip_property(levels, normalize, nsym, seed):
    a = build_alphabet(levels, normalize)
    b = generate_payload(nsym * a.bits_per_symbol, seed)
    np.testing.assert_array_equal(demap_symbols(map_bits(b, a), a), b)


@settings(max_examples=60, deadline=None)
@given(levels=st.sampled_from(SUPPORTED_LEVELS),
       x=st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=50))
def test_quantization_idempotent(levels, x):
    a = build_alphabet(levels)
    once = demap_symbols(x, a)
    np.testing.assert_array_equal(demap_symbols(map_bits(once, a), a), once)


def test_nearest_level_brute_force(rng):
    a = build_alphabet(4)
    x = rng.uniform(-2, 2, 500)
    brute = np.array([np.argmin(np.abs(v - a.amplitudes)) for v in x])
    np.testing.assert_array_equal(a.quantize_index(x), brute)


def test_payload_determinism_and_balance():
    assert generate_payload(0, 3).size == 0
    np.testing.assert_array_equal(generate_payload(1000, 5), generate_payload(1000, 5))
    ones = generate_payload(10**6, 1).mean()
    assert abs(ones - 0.5) < 0.01
    with pytest.raises(ValueError):
        generate_payload(-1, 0)


def test_all_pam4_sequences_roundtrip():
    a = build_alphabet(4)
    for combo in itertools.product([0, 1], repeat=6):
        b = np.array(combo, dtype=np.uint8)
        np.testing.assert_array_equal(demap_symbols(map_bits(b, a), a), b)
