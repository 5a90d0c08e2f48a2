"""Convolutional codec: impulse-response oracle, rate adaptation, ML decoding."""

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from vlcphy.errors import ConfigError, FramingError
from vlcphy.fec import ConvolutionalCode, cc_encode, viterbi_decode
from vlcphy.fec.convolutional import GENERATORS_OCTAL, TAIL_BITS

R13 = ConvolutionalCode(Fraction(1, 3))
R14 = ConvolutionalCode(Fraction(1, 4))
R23 = ConvolutionalCode(Fraction(2, 3))
ALL_RATES = [R13, R14, R23]


def test_generator_constants():
    assert GENERATORS_OCTAL == (0o133, 0o171, 0o165)
    assert TAIL_BITS == 6


def test_impulse_response_equals_generator_taps():
    """A lone 1 shifts through the register, reading out each generator MSB-first."""
    stream = cc_encode([1], R13)
    triplets = stream.reshape(-1, 3)
    for g_index, g in enumerate(GENERATORS_OCTAL):
        expected = [int(c) for c in format(g, "07b")]
        assert triplets[:, g_index].tolist() == expected


def test_zero_message_encodes_to_zeros():
    for code in ALL_RATES:
        stream = cc_encode([0, 0, 0, 0], code)
        assert stream.size == code.output_length(4)
        assert int(stream.sum()) == 0


@pytest.mark.parametrize("code", ALL_RATES)
@pytest.mark.parametrize("length", [0, 1, 2, 5, 8, 33, 100])
def test_output_length_formula(code, length):
    pat_in, pat_out, _ = code.pattern
    expected = -(-(length + TAIL_BITS) * pat_out // pat_in)
    bits = np.zeros(length, dtype=np.uint8)
    assert cc_encode(bits, code).size == expected
    assert code.output_length(length) == expected


def test_rate_one_quarter_repeats_the_first_generator_output():
    rng = np.random.default_rng(20)
    bits = rng.integers(0, 2, 40)
    base = cc_encode(bits, R13).reshape(-1, 3)
    quad = cc_encode(bits, R14).reshape(-1, 4)
    np.testing.assert_array_equal(quad[:, 0], base[:, 0])
    np.testing.assert_array_equal(quad[:, 1], base[:, 0])
    np.testing.assert_array_equal(quad[:, 2:], base[:, 1:])


def test_rate_two_thirds_keeps_three_of_six_mother_bits():
    rng = np.random.default_rng(21)
    bits = rng.integers(0, 2, 40)
    mother = cc_encode(bits, R13)
    punctured = cc_encode(bits, R23)
    keep = np.tile([1, 1, 0, 1, 0, 0], (mother.size + 5) // 6).astype(bool)[: mother.size]
    np.testing.assert_array_equal(punctured, mother[keep])


def test_exhaustive_short_messages_roundtrip():
    for code in ALL_RATES:
        for length in range(0, 7):
            for message in product((0, 1), repeat=length):
                bits = np.array(message, dtype=np.uint8)
                decoded = viterbi_decode(cc_encode(bits, code), code)
                np.testing.assert_array_equal(decoded, bits)


@pytest.mark.parametrize("code", ALL_RATES)
def test_random_long_messages_roundtrip(code):
    rng = np.random.default_rng(22)
    for _ in range(20):
        bits = rng.integers(0, 2, int(rng.integers(1, 400)))
        decoded = viterbi_decode(cc_encode(bits, code), code)
        np.testing.assert_array_equal(decoded, bits)


def test_single_channel_flip_is_always_corrected_at_low_rates():
    rng = np.random.default_rng(23)
    for code in (R13, R14):
        bits = rng.integers(0, 2, 30)
        stream = cc_encode(bits, code)
        for pos in range(stream.size):
            corrupted = stream.copy()
            corrupted[pos] ^= 1
            decoded = viterbi_decode(corrupted, code)
            np.testing.assert_array_equal(decoded, bits)


def test_two_spread_flips_corrected_at_rate_one_third():
    rng = np.random.default_rng(24)
    bits = rng.integers(0, 2, 60)
    stream = cc_encode(bits, R13)
    for _ in range(50):
        a, b = rng.choice(stream.size, 2, replace=False)
        if abs(int(a) - int(b)) < 9:
            continue  # keep the flips in separate constraint spans
        corrupted = stream.copy()
        corrupted[a] ^= 1
        corrupted[b] ^= 1
        decoded = viterbi_decode(corrupted, R13)
        np.testing.assert_array_equal(decoded, bits)


def test_invalid_stream_length_raises():
    with pytest.raises(FramingError):
        viterbi_decode(np.zeros(20, dtype=np.uint8), R13)  # 20 is not 3*steps


def test_unsupported_rate_rejected():
    with pytest.raises(ConfigError):
        ConvolutionalCode(Fraction(1, 2))
