"""Bit-array helpers.

Bits are numpy uint8 arrays holding 0/1 values, one element per bit. Byte
conversions are most-significant-bit first throughout the package and its
file formats.
"""

from __future__ import annotations

import numpy as np

from .errors import FramingError


def as_bits(seq) -> np.ndarray:
    """Coerce a sequence of 0/1 values to a uint8 bit array."""
    bits = np.asarray(seq, dtype=np.uint8)
    if bits.ndim != 1:
        msg = f"expected a 1-D bit sequence, got shape {bits.shape}"
        raise FramingError(msg)
    if bits.size and bits.max() > 1:
        msg = "bit sequence contains values other than 0/1"
        raise FramingError(msg)
    return bits


def bits_from_bytes(data: bytes) -> np.ndarray:
    """Unpack bytes into bits, MSB first."""
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))


def bytes_from_bits(bits) -> bytes:
    """Pack a bit array (length divisible by 8, MSB first) into bytes."""
    bits = as_bits(bits)
    if bits.size % 8:
        msg = f"bit length {bits.size} is not a whole number of octets"
        raise FramingError(msg)
    return np.packbits(bits).tobytes()


def bits_from_int(value: int, width: int) -> np.ndarray:
    """Fixed-width big-endian bit representation of a non-negative int."""
    if value < 0 or value >> width:
        msg = f"value {value} does not fit in {width} bits"
        raise FramingError(msg)
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def int_from_bits(bits) -> int:
    """Interpret a bit array as a big-endian unsigned integer."""
    value = 0
    for b in as_bits(bits):
        value = (value << 1) | int(b)
    return value


def pack_symbols(bits, symbol_bits: int) -> np.ndarray:
    """Group a bit array into integer symbols of `symbol_bits` bits, MSB first."""
    bits = as_bits(bits)
    if bits.size % symbol_bits:
        msg = f"bit length {bits.size} is not divisible by symbol size {symbol_bits}"
        raise FramingError(msg)
    weights = 1 << np.arange(symbol_bits - 1, -1, -1)
    return (bits.reshape(-1, symbol_bits) * weights).sum(axis=1).astype(np.int64)


def unpack_symbols(symbols, symbol_bits: int) -> np.ndarray:
    """Expand integer symbols back into a bit array, MSB first."""
    symbols = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(symbol_bits - 1, -1, -1)
    return ((symbols[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def max_run_length(values) -> int:
    """Length of the longest run of identical consecutive values."""
    arr = np.asarray(values)
    if arr.size == 0:
        return 0
    change = np.flatnonzero(arr[1:] != arr[:-1])
    edges = np.concatenate(([-1], change, [arr.size - 1]))
    return int(np.diff(edges).max())
