"""Block interleaving and the per-mode FEC encode/decode paths.

Encode order: symbolize -> pad to whole RS blocks -> RS encode each block ->
interleave across blocks -> (PHY-I only) convolutional encode. Decoding
runs the stages in reverse and reports per-block corrections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..bitops import as_bits, pack_symbols, unpack_symbols
from ..errors import DecodeFailure, FramingError
from ..modes import OperatingMode, Phy
from .convolutional import ConvolutionalCode
from .convolutional import cc_encode as _cc_encode
from .convolutional import viterbi_decode as _viterbi_decode
from .reed_solomon import RsCode, rs_code_for, rs_decode, rs_encode


def interleave(symbols, depth: int) -> np.ndarray:
    """Row-in/column-out block permutation.

    The input is laid into `depth` rows (one RS block per row) and read out
    column-wise, so any burst of up to `depth` consecutive channel symbols
    lands at most once per row.
    """
    symbols = np.asarray(symbols)
    if depth < 1:
        msg = f"interleaver depth must be >= 1, got {depth}"
        raise FramingError(msg)
    if symbols.size % depth:
        msg = f"length {symbols.size} is not divisible by depth {depth}"
        raise FramingError(msg)
    return symbols.reshape(depth, -1).T.ravel()


def deinterleave(symbols, depth: int) -> np.ndarray:
    """Inverse of interleave with the same depth."""
    symbols = np.asarray(symbols)
    if depth < 1:
        msg = f"interleaver depth must be >= 1, got {depth}"
        raise FramingError(msg)
    if symbols.size % depth:
        msg = f"length {symbols.size} is not divisible by depth {depth}"
        raise FramingError(msg)
    return symbols.reshape(-1, depth).T.ravel()


@dataclass
class BlockReport:
    """Outcome of one RS block decode."""

    corrected: int
    ok: bool


@dataclass
class FecReport:
    """Aggregate decode diagnostics for one coded section."""

    blocks: list[BlockReport] = field(default_factory=list)
    cc_used: bool = False

    @property
    def corrected_symbols(self) -> int:
        return sum(b.corrected for b in self.blocks)

    @property
    def ok(self) -> bool:
        return all(b.ok for b in self.blocks)


def _rs_geometry(payload_bits: int, code: RsCode) -> tuple[int, int]:
    """(symbol count before padding, number of RS blocks)."""
    bits_per_symbol = code.field.symbol_bits
    n_symbols = -(-payload_bits // bits_per_symbol)
    n_blocks = max(1, -(-n_symbols // code.k))
    return n_symbols, n_blocks


def fec_encoded_length(payload_bits: int, mode: OperatingMode) -> int:
    """Coded bit count produced by fec_encode for `payload_bits` of data."""
    if mode.rs_params is None:
        return payload_bits
    code = rs_code_for(mode.rs_params)
    _, n_blocks = _rs_geometry(payload_bits, code)
    coded_bits = n_blocks * code.n * code.field.symbol_bits
    if mode.cc_rate is not None:
        coded_bits = ConvolutionalCode(mode.cc_rate).output_length(coded_bits)
    return coded_bits


def fec_encode(bits, mode: OperatingMode) -> np.ndarray:
    """Apply a mode's outer RS code, interleaving and inner code to a bit stream."""
    bits = as_bits(bits)
    if mode.rs_params is None:
        return bits.copy()
    code = rs_code_for(mode.rs_params)
    sym_bits = code.field.symbol_bits
    n_symbols, n_blocks = _rs_geometry(bits.size, code)

    padded = np.concatenate([bits, np.zeros(n_symbols * sym_bits - bits.size, dtype=np.uint8)])
    symbols = pack_symbols(padded, sym_bits)
    symbols = np.concatenate([symbols, np.zeros(n_blocks * code.k - symbols.size, dtype=np.int64)])

    codewords = np.concatenate(
        [rs_encode(symbols[b * code.k : (b + 1) * code.k], code) for b in range(n_blocks)]
    )
    mixed = interleave(codewords, n_blocks)
    coded_bits = unpack_symbols(mixed, sym_bits)
    if mode.cc_rate is not None:
        coded_bits = _cc_encode(coded_bits, ConvolutionalCode(mode.cc_rate))
    return coded_bits


def fec_decode(bits, mode: OperatingMode, payload_bits: int) -> tuple[np.ndarray, FecReport]:
    """Invert fec_encode; `payload_bits` recovers the zero-symbol padding.

    Raises DecodeFailure (carrying the partial report) when any RS block is
    uncorrectable.
    """
    bits = as_bits(bits)
    expected = fec_encoded_length(payload_bits, mode)
    if bits.size != expected:
        msg = f"coded length {bits.size} does not match expected {expected}"
        raise FramingError(msg)
    report = FecReport()
    if mode.rs_params is None:
        return bits.copy(), report

    code = rs_code_for(mode.rs_params)
    sym_bits = code.field.symbol_bits
    n_symbols, n_blocks = _rs_geometry(payload_bits, code)

    if mode.cc_rate is not None:
        report.cc_used = True
        bits = _viterbi_decode(bits, ConvolutionalCode(mode.cc_rate))
    mixed = pack_symbols(bits, sym_bits)
    codewords = deinterleave(mixed, n_blocks)

    messages = []
    failed = False
    for b in range(n_blocks):
        word = codewords[b * code.n : (b + 1) * code.n]
        try:
            message, corrected = rs_decode(word, code)
            report.blocks.append(BlockReport(corrected, True))
        except DecodeFailure:
            message = word[: code.k]
            report.blocks.append(BlockReport(0, False))
            failed = True
        messages.append(message)
    if failed:
        bad = [i for i, blk in enumerate(report.blocks) if not blk.ok]
        msg = f"uncorrectable RS block(s) {bad}"
        raise DecodeFailure(msg, report=report)
    symbols = np.concatenate(messages)[:n_symbols]
    return unpack_symbols(symbols, sym_bits)[:payload_bits], report
