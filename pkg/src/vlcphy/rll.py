"""Run-length-limited line codes: Manchester, 4B6B and 8B10B.

All encoders map data bits to DC-balanced chip streams; strict decoders raise
InvalidSymbolError on illegal groups, while the `*_nearest` variants make
minimum-Hamming-distance decisions for use behind a noisy slicer (ties break
toward the lowest table entry).
"""

from __future__ import annotations

import numpy as np

from .bitops import as_bits, pack_symbols, unpack_symbols
from .errors import ConfigError, FramingError, InvalidSymbolError

# --------------------------------------------------------------------------
# Manchester: 0 -> 01, 1 -> 10

_MANCHESTER = np.array([[0, 1], [1, 0]], dtype=np.uint8)


def manchester_encode(bits) -> np.ndarray:
    """Expand each bit into its two-chip Manchester symbol."""
    bits = as_bits(bits)
    return _MANCHESTER[bits].ravel()


def manchester_decode(chips) -> np.ndarray:
    """Strict Manchester decode; 00/11 groups raise InvalidSymbolError."""
    chips = as_bits(chips)
    if chips.size % 2:
        msg = f"chip count {chips.size} is not a whole number of Manchester symbols"
        raise FramingError(msg)
    pairs = chips.reshape(-1, 2)
    bad = np.flatnonzero(pairs[:, 0] == pairs[:, 1])
    if bad.size:
        pos = int(bad[0])
        msg = f"illegal Manchester group {pairs[pos].tolist()} at symbol {pos}"
        raise InvalidSymbolError(msg, position=pos)
    return pairs[:, 0].copy()


def manchester_decode_nearest(chips) -> np.ndarray:
    """Tolerant Manchester decode: the first chip decides (ML tie toward it)."""
    chips = as_bits(chips)
    if chips.size % 2:
        msg = f"chip count {chips.size} is not a whole number of Manchester symbols"
        raise FramingError(msg)
    return chips.reshape(-1, 2)[:, 0].copy()


# --------------------------------------------------------------------------
# 4B6B: each nibble maps to a fixed weight-3 six-chip word; any stream is
# exactly DC balanced and runs never exceed four chips.

_4B6B_WORDS = np.array(
    [
        [0, 0, 1, 1, 1, 0],  # 0x0
        [0, 0, 1, 1, 0, 1],  # 0x1
        [0, 1, 0, 0, 1, 1],  # 0x2
        [0, 1, 0, 1, 1, 0],  # 0x3
        [0, 1, 0, 1, 0, 1],  # 0x4
        [1, 0, 0, 0, 1, 1],  # 0x5
        [1, 0, 0, 1, 1, 0],  # 0x6
        [1, 0, 0, 1, 0, 1],  # 0x7
        [0, 1, 1, 0, 0, 1],  # 0x8
        [0, 1, 1, 0, 1, 0],  # 0x9
        [0, 1, 1, 1, 0, 0],  # 0xA
        [1, 1, 0, 0, 0, 1],  # 0xB
        [1, 1, 0, 0, 1, 0],  # 0xC
        [1, 0, 1, 0, 0, 1],  # 0xD
        [1, 0, 1, 0, 1, 0],  # 0xE
        [1, 0, 1, 1, 0, 0],  # 0xF
    ],
    dtype=np.uint8,
)

_POW6 = 1 << np.arange(5, -1, -1)
_4B6B_VALUES = (_4B6B_WORDS * _POW6).sum(axis=1)
# reverse lookup: 6-bit word value -> nibble, -1 for illegal words
_4B6B_REVERSE = np.full(64, -1, dtype=np.int16)
_4B6B_REVERSE[_4B6B_VALUES] = np.arange(16)
# nearest valid nibble for every 6-bit word (tie -> lowest nibble)
_4B6B_NEAREST = np.array(
    [
        int(np.argmin([bin(w ^ int(v)).count("1") for v in _4B6B_VALUES]))
        for w in range(64)
    ],
    dtype=np.uint8,
)


def encode_4b6b(bits) -> np.ndarray:
    """Encode a bit stream (length divisible by 4) into 6-chip words."""
    nibbles = pack_symbols(bits, 4)
    return _4B6B_WORDS[nibbles].ravel()


def decode_4b6b(chips) -> np.ndarray:
    """Strict 4B6B decode; unknown words raise InvalidSymbolError."""
    chips = as_bits(chips)
    if chips.size % 6:
        msg = f"chip count {chips.size} is not a whole number of 4B6B words"
        raise FramingError(msg)
    words = (chips.reshape(-1, 6) * _POW6).sum(axis=1)
    nibbles = _4B6B_REVERSE[words]
    bad = np.flatnonzero(nibbles < 0)
    if bad.size:
        pos = int(bad[0])
        msg = f"word {words[pos]:06b} at symbol {pos} is not a 4B6B codeword"
        raise InvalidSymbolError(msg, position=pos)
    return unpack_symbols(nibbles, 4)


def decode_4b6b_nearest(chips) -> np.ndarray:
    """Tolerant 4B6B decode via the precomputed nearest-codeword table."""
    chips = as_bits(chips)
    if chips.size % 6:
        msg = f"chip count {chips.size} is not a whole number of 4B6B words"
        raise FramingError(msg)
    words = (chips.reshape(-1, 6) * _POW6).sum(axis=1)
    return unpack_symbols(_4B6B_NEAREST[words], 4)


# --------------------------------------------------------------------------
# 8B10B: classic two-stage construction. Each byte splits into a 5-bit and a
# 3-bit field encoded to 6 and 4 chips (stream order abcdei fghj), with the
# alternate 4-chip word for x in {17,18,20}/{11,13,14} preventing long runs.
# Running disparity stays in {-1,+1} and runs never exceed five chips.

_5B6B_MINUS = {
    0: "100111", 1: "011101", 2: "101101", 3: "110001", 4: "110101",
    5: "101001", 6: "011001", 7: "111000", 8: "111001", 9: "100101",
    10: "010101", 11: "110100", 12: "001101", 13: "101100", 14: "011100",
    15: "010111", 16: "011011", 17: "100011", 18: "010011", 19: "110010",
    20: "001011", 21: "101010", 22: "011010", 23: "111010", 24: "110011",
    25: "100110", 26: "010110", 27: "110110", 28: "001110", 29: "101110",
    30: "011110", 31: "101011",
}
_3B4B_MINUS = {0: "1011", 1: "1001", 2: "0101", 3: "1100", 4: "1101",
               5: "1010", 6: "0110", 7: "1110"}
_3B4B_ALT7 = "0111"
# use the alternate D.x.7 word when the primary one would create a five-chip
# run across the sub-block boundary
_ALT7_MINUS = {17, 18, 20}
_ALT7_PLUS = {11, 13, 14}


def _word_bits(text: str) -> tuple[int, ...]:
    return tuple(int(c) for c in text)


def _complement(text: str) -> str:
    return "".join("1" if c == "0" else "0" for c in text)


def _encode_byte(byte: int, rd: int) -> tuple[tuple[int, ...], int]:
    """Encode one byte at running disparity rd; returns (10 chips, new rd)."""
    low5 = byte & 0x1F
    high3 = byte >> 5
    six = _5B6B_MINUS[low5]
    six_disp = 2 * six.count("1") - 6
    if six_disp == 0:
        # balanced; D.07 still flips its form with rd to bound run lengths
        if low5 == 7 and rd > 0:
            six = _complement(six)
    elif rd > 0:
        six = _complement(six)
        six_disp = -six_disp
    rd_mid = rd if six_disp == 0 else -rd

    if high3 == 7:
        alt = (rd_mid < 0 and low5 in _ALT7_MINUS) or (rd_mid > 0 and low5 in _ALT7_PLUS)
        four = _3B4B_ALT7 if alt else _3B4B_MINUS[7]
    else:
        four = _3B4B_MINUS[high3]
    four_disp = 2 * four.count("1") - 4
    if four_disp == 0:
        if high3 == 3 and rd_mid > 0:
            four = _complement(four)
    elif rd_mid > 0:
        four = _complement(four)
        four_disp = -four_disp
    rd_out = rd_mid if four_disp == 0 else -rd_mid
    return _word_bits(six) + _word_bits(four), rd_out


def _build_8b10b_tables():
    encode = {}
    decode = {}
    for rd in (-1, 1):
        for byte in range(256):
            word, rd_out = _encode_byte(byte, rd)
            value = 0
            for bit in word:
                value = (value << 1) | bit
            encode[(rd, byte)] = (value, rd_out)
            key = (rd, value)
            if key in decode and decode[key][0] != byte:
                msg = "8B10B table collision"
                raise AssertionError(msg)
            decode[key] = (byte, rd_out)
    return encode, decode


_8B10B_ENCODE, _8B10B_DECODE = _build_8b10b_tables()

# nearest valid 10-bit word per running disparity, for the tolerant decoder
_POW10 = 1 << np.arange(9, -1, -1)


def _build_8b10b_nearest():
    tables = {}
    all_words = ((np.arange(1024)[:, None] >> np.arange(9, -1, -1)) & 1).astype(np.uint8)
    for rd in (-1, 1):
        valid = np.array([_8B10B_ENCODE[(rd, b)][0] for b in range(256)])
        valid_bits = ((valid[:, None] >> np.arange(9, -1, -1)) & 1).astype(np.uint8)
        dist = (all_words[:, None, :] != valid_bits[None, :, :]).sum(axis=2)
        best = dist.argmin(axis=1).astype(np.int16)  # first hit = lowest byte
        new_rd = np.array([_8B10B_ENCODE[(rd, int(b))][1] for b in best], dtype=np.int8)
        tables[rd] = (best, new_rd)
    return tables


_8B10B_NEAREST = _build_8b10b_nearest()


def _check_rd(rd: int) -> int:
    if rd not in (-1, 1):
        msg = f"running disparity must be -1 or +1, got {rd}"
        raise ConfigError(msg)
    return rd


def encode_8b10b(bits, rd: int = -1) -> tuple[np.ndarray, int]:
    """Encode a bit stream (length divisible by 8) into 10-chip blocks.

    Returns the chip stream and the running disparity after the last block.
    """
    rd = _check_rd(rd)
    data = pack_symbols(bits, 8)
    out = np.empty(data.size * 10, dtype=np.uint8)
    for i, byte in enumerate(data):
        value, rd = _8B10B_ENCODE[(rd, int(byte))]
        out[i * 10 : (i + 1) * 10] = (value >> np.arange(9, -1, -1)) & 1
    return out, rd


def decode_8b10b(chips, rd: int = -1) -> tuple[np.ndarray, int]:
    """Strict 8B10B decode; illegal blocks or disparity violations raise."""
    rd = _check_rd(rd)
    chips = as_bits(chips)
    if chips.size % 10:
        msg = f"chip count {chips.size} is not a whole number of 8B10B blocks"
        raise FramingError(msg)
    words = (chips.reshape(-1, 10) * _POW10).sum(axis=1)
    data = np.empty(words.size, dtype=np.uint8)
    for i, value in enumerate(words):
        entry = _8B10B_DECODE.get((rd, int(value)))
        if entry is None:
            msg = f"block {int(value):010b} at symbol {i} is not valid at disparity {rd:+d}"
            raise InvalidSymbolError(msg, position=i)
        data[i], rd = entry
    return unpack_symbols(data, 8), rd


def decode_8b10b_nearest(chips, rd: int = -1) -> tuple[np.ndarray, int]:
    """Tolerant 8B10B decode via per-disparity nearest-word tables."""
    rd = _check_rd(rd)
    chips = as_bits(chips)
    if chips.size % 10:
        msg = f"chip count {chips.size} is not a whole number of 8B10B blocks"
        raise FramingError(msg)
    words = (chips.reshape(-1, 10) * _POW10).sum(axis=1)
    data = np.empty(words.size, dtype=np.uint8)
    for i, value in enumerate(words):
        best, new_rd = _8B10B_NEAREST[rd]
        data[i] = best[int(value)]
        rd = int(new_rd[int(value)])
    return unpack_symbols(data, 8), rd


def line_encode(mode_line, bits, rd: int = -1) -> np.ndarray:
    """Dispatch encoding for a mode's line code (disparity starts at rd)."""
    from .modes import LineCode

    if mode_line is LineCode.MANCHESTER:
        return manchester_encode(bits)
    if mode_line is LineCode.FOUR_SIX:
        return encode_4b6b(bits)
    chips, _ = encode_8b10b(bits, rd)
    return chips


def line_decode_nearest(mode_line, chips, rd: int = -1) -> np.ndarray:
    """Dispatch tolerant decoding for a mode's line code."""
    from .modes import LineCode

    if mode_line is LineCode.MANCHESTER:
        return manchester_decode_nearest(chips)
    if mode_line is LineCode.FOUR_SIX:
        return decode_4b6b_nearest(chips)
    bits, _ = decode_8b10b_nearest(chips, rd)
    return bits


def line_expansion(mode_line) -> tuple[int, int]:
    """(data_bits, chips) per line-code group."""
    from .modes import LineCode

    return {
        LineCode.MANCHESTER: (1, 2),
        LineCode.FOUR_SIX: (4, 6),
        LineCode.EIGHT_TEN: (8, 10),
    }[mode_line]
