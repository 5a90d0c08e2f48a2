"""Frame construction: synchronization header, PHY header and PSDU.

Frame layout (chip domain, in transmit order):

    SHR  = FLP (64 bits, "01" x 32) + TDP (one of four 15-bit m-sequence
           phases repeated 4 times, 60 bits); never line- or FEC-coded,
           always modulated as plain on/off chips.
    PHR  = 47 bits (31 info + CRC-16/CCITT-FALSE), protected by the PHY's
           base code: RS(15,7) + rate-1/4 convolutional + Manchester on
           PHY-I, RS(64,32) + the mode's line code on PHY-II.
    PSDU = MHR (3 octets) + payload, through the mode's FEC path and line
           code.

PHR info bits: phy(1) | mode_index(5) | psdu_length(16) | dimming_level(7)
| reserved(2), most significant bit first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bitops import as_bits, bits_from_bytes, bits_from_int, bytes_from_bits, int_from_bits
from .errors import ConfigError, FramingError, HeaderCorruptError, UnknownModeError
from .fec import (
    ConvolutionalCode,
    cc_encode,
    fec_encode,
    fec_encoded_length,
    interleave,
    deinterleave,
    rs_code_for,
    rs_decode,
    rs_encode,
    viterbi_decode,
)
from .bitops import pack_symbols, unpack_symbols
from .errors import DecodeFailure
from .modes import LineCode, Modulation, OperatingMode, Phy, lookup_mode
from .rll import line_decode_nearest, line_encode, line_expansion

MAX_PSDU_OCTETS = 65_532
MHR_OCTETS = 3
PHR_INFO_BITS = 31
PHR_BITS = 47

# ---------------------------------------------------------------------------
# synchronization header patterns

FLP = np.tile(np.array([0, 1], dtype=np.uint8), 32)


def _m_sequence_15() -> np.ndarray:
    """One period of the length-15 m-sequence from x^4 + x + 1."""
    reg = [1, 0, 0, 0]
    out = []
    for _ in range(15):
        out.append(reg[-1])
        feedback = reg[-1] ^ reg[0]
        reg = [feedback] + reg[:-1]
    return np.array(out, dtype=np.uint8)


_MSEQ = _m_sequence_15()
N_TOPOLOGIES = 4
# four cyclic phases; any two have periodic cross-correlation -1 per period
TDP_PATTERNS = tuple(
    np.tile(np.roll(_MSEQ, -4 * k), 4) for k in range(N_TOPOLOGIES)
)
SHR_BITS = FLP.size + TDP_PATTERNS[0].size  # 124


def shr_bits(topology: int = 0) -> np.ndarray:
    """FLP followed by the topology's TDP."""
    if not 0 <= topology < N_TOPOLOGIES:
        msg = f"topology must be 0..{N_TOPOLOGIES - 1}, got {topology}"
        raise ConfigError(msg)
    return np.concatenate([FLP, TDP_PATTERNS[topology]])


# ---------------------------------------------------------------------------
# header CRC: CRC-16/CCITT-FALSE applied bit-serially, MSB first

CRC_POLY = 0x1021
CRC_INIT = 0xFFFF


def crc16(bits) -> int:
    """Bit-serial CRC-16/CCITT-FALSE over an arbitrary-length bit stream."""
    reg = CRC_INIT
    for bit in as_bits(bits):
        top = (reg >> 15) & 1
        reg = (reg << 1) & 0xFFFF
        if top ^ int(bit):
            reg ^= CRC_POLY
    return reg


# ---------------------------------------------------------------------------
# PHY header and MAC header

@dataclass(frozen=True)
class Phr:
    """Decoded PHY-header fields."""

    phy: Phy
    mode_index: int
    psdu_length: int
    dimming_level: int
    reserved: int = 0

    @property
    def mcs_id(self) -> int:
        phy_bit = 0 if self.phy is Phy.PHY1 else 1
        return (phy_bit << 5) | self.mode_index


@dataclass(frozen=True)
class Mhr:
    """Fixed 3-octet MAC header: frame control and sequence number."""

    frame_control: int = 0x0001
    sequence_number: int = 0

    def to_bytes(self) -> bytes:
        if not 0 <= self.frame_control < (1 << 16):
            msg = "frame_control must fit in 16 bits"
            raise FramingError(msg)
        if not 0 <= self.sequence_number < 256:
            msg = "sequence_number must fit in 8 bits"
            raise FramingError(msg)
        return self.frame_control.to_bytes(2, "big") + bytes([self.sequence_number])

    @classmethod
    def from_bytes(cls, data: bytes) -> "Mhr":
        if len(data) != MHR_OCTETS:
            msg = f"MHR must be {MHR_OCTETS} octets"
            raise FramingError(msg)
        return cls(int.from_bytes(data[:2], "big"), data[2])


def build_phr(phr: Phr) -> np.ndarray:
    """Pack PHR fields and append the CRC; always 47 bits."""
    if not 0 <= phr.mode_index < 32:
        msg = f"mode index {phr.mode_index} does not fit in 5 bits"
        raise ConfigError(msg)
    if not 0 <= phr.psdu_length <= MAX_PSDU_OCTETS + MHR_OCTETS:
        msg = f"psdu_length {phr.psdu_length} outside 0..{MAX_PSDU_OCTETS + MHR_OCTETS}"
        raise ConfigError(msg)
    if not 0 <= phr.dimming_level <= 100:
        msg = f"dimming_level {phr.dimming_level} outside 0..100"
        raise ConfigError(msg)
    if not 0 <= phr.reserved < 4:
        msg = "reserved field is 2 bits"
        raise ConfigError(msg)
    info = np.concatenate(
        [
            bits_from_int(0 if phr.phy is Phy.PHY1 else 1, 1),
            bits_from_int(phr.mode_index, 5),
            bits_from_int(phr.psdu_length, 16),
            bits_from_int(phr.dimming_level, 7),
            bits_from_int(phr.reserved, 2),
        ]
    )
    return np.concatenate([info, bits_from_int(crc16(info), 16)])


def parse_phr(bits) -> Phr:
    """Validate the CRC and unpack the 47 header bits.

    Raises HeaderCorruptError on CRC mismatch and UnknownModeError when the
    announced mode index is not in the registry.
    """
    bits = as_bits(bits)
    if bits.size != PHR_BITS:
        msg = f"PHR must be {PHR_BITS} bits, got {bits.size}"
        raise FramingError(msg)
    info, check = bits[:PHR_INFO_BITS], bits[PHR_INFO_BITS:]
    if crc16(info) != int_from_bits(check):
        msg = "PHR CRC mismatch"
        raise HeaderCorruptError(msg)
    phy = Phy.PHY1 if info[0] == 0 else Phy.PHY2
    index = int_from_bits(info[1:6])
    phr = Phr(
        phy=phy,
        mode_index=index,
        psdu_length=int_from_bits(info[6:22]),
        dimming_level=int_from_bits(info[22:29]),
        reserved=int_from_bits(info[29:31]),
    )
    try:
        lookup_mode(phy, index)
    except Exception as exc:
        msg = f"header announces unknown mode {phy.value}/{index}"
        raise UnknownModeError(msg) from exc
    if phr.dimming_level > 100:
        msg = f"header dimming level {phr.dimming_level} outside 0..100"
        raise HeaderCorruptError(msg)
    return phr


# ---------------------------------------------------------------------------
# PHR base-mode coding

def phr_line_code(mode: OperatingMode) -> LineCode:
    """Line code protecting the PHR for a given payload mode."""
    return LineCode.MANCHESTER if mode.phy is Phy.PHY1 else mode.line_code


def phr_modulation(mode: OperatingMode) -> Modulation:
    """PHR modulation: OOK on PHY-I; the mode's own modulation on PHY-II."""
    return Modulation.OOK if mode.phy is Phy.PHY1 else mode.modulation


def _phr_symbol_blocks(phy: Phy) -> tuple:
    """(RS code, zero-padded symbol count, block count) of the header code."""
    if phy is Phy.PHY1:
        code = rs_code_for((15, 7))
        n_symbols = 12  # 47 bits -> 48 -> 12 nibbles
    else:
        code = rs_code_for((64, 32))
        n_symbols = 6  # 47 bits -> 48 -> 6 octets
    n_blocks = -(-n_symbols // code.k)
    return code, n_symbols, n_blocks


def encode_phr(phr: Phr, mode: OperatingMode) -> np.ndarray:
    """PHR bits through the base-mode code and line code, as chips."""
    bits = build_phr(phr)
    code, n_symbols, n_blocks = _phr_symbol_blocks(mode.phy)
    sym_bits = code.field.symbol_bits
    padded = np.concatenate([bits, np.zeros(n_symbols * sym_bits - bits.size, dtype=np.uint8)])
    symbols = pack_symbols(padded, sym_bits)
    symbols = np.concatenate([symbols, np.zeros(n_blocks * code.k - symbols.size, dtype=np.int64)])
    words = np.concatenate(
        [rs_encode(symbols[b * code.k : (b + 1) * code.k], code) for b in range(n_blocks)]
    )
    coded = unpack_symbols(interleave(words, n_blocks), sym_bits)
    if mode.phy is Phy.PHY1:
        coded = cc_encode(coded, ConvolutionalCode(Fraction(1, 4)))
    return line_encode(phr_line_code(mode), coded)


def phr_chip_count(phy: Phy, line: LineCode) -> int:
    """Chip length of the coded PHR section."""
    code, _, n_blocks = _phr_symbol_blocks(phy)
    coded_bits = n_blocks * code.n * code.field.symbol_bits
    if phy is Phy.PHY1:
        coded_bits = ConvolutionalCode(Fraction(1, 4)).output_length(coded_bits)
    data_bits, chips = line_expansion(line)
    if coded_bits % data_bits:
        msg = "PHR coded length does not align with the line code"
        raise FramingError(msg)
    return coded_bits // data_bits * chips


def decode_phr(chips, phy: Phy, line: LineCode) -> tuple[Phr, int]:
    """Invert encode_phr; returns (phr, corrected_symbols).

    RS failure or CRC mismatch raises HeaderCorruptError.
    """
    chips = as_bits(chips)
    if chips.size != phr_chip_count(phy, line):
        msg = f"PHR section must hold {phr_chip_count(phy, line)} chips"
        raise FramingError(msg)
    coded = line_decode_nearest(line, chips)
    if phy is Phy.PHY1:
        coded = viterbi_decode(coded, ConvolutionalCode(Fraction(1, 4)))
    code, n_symbols, n_blocks = _phr_symbol_blocks(phy)
    sym_bits = code.field.symbol_bits
    words = deinterleave(pack_symbols(coded, sym_bits), n_blocks)
    corrected = 0
    messages = []
    for b in range(n_blocks):
        try:
            message, count = rs_decode(words[b * code.n : (b + 1) * code.n], code)
        except DecodeFailure as exc:
            msg = "PHR block failed error correction"
            raise HeaderCorruptError(msg) from exc
        corrected += count
        messages.append(message)
    bits = unpack_symbols(np.concatenate(messages)[:n_symbols], sym_bits)[:PHR_BITS]
    return parse_phr(bits), corrected


# ---------------------------------------------------------------------------
# whole frames

@dataclass(frozen=True)
class Frame:
    """A fully coded frame in the chip domain, split by section."""

    mode: OperatingMode
    phr: Phr
    mhr: Mhr
    payload: bytes
    shr_chips: np.ndarray
    phr_chips: np.ndarray
    psdu_chips: np.ndarray
    topology: int = 0

    @property
    def total_chips(self) -> int:
        return self.shr_chips.size + self.phr_chips.size + self.psdu_chips.size

    @property
    def section_offsets(self) -> tuple[int, int, int]:
        """Chip offsets of (PHR start, PSDU start, frame end)."""
        a = self.shr_chips.size
        b = a + self.phr_chips.size
        return a, b, self.total_chips

    @property
    def chips(self) -> np.ndarray:
        return np.concatenate([self.shr_chips, self.phr_chips, self.psdu_chips])


def psdu_chip_count(mode: OperatingMode, psdu_octets: int) -> int:
    """Chip length of the coded PSDU section for a PSDU of given size."""
    coded_bits = fec_encoded_length(psdu_octets * 8, mode)
    data_bits, chips = line_expansion(mode.line_code)
    if coded_bits % data_bits:
        # pad the line-code input with zero bits; only 8B10B can need this
        coded_bits += data_bits - coded_bits % data_bits
    return coded_bits // data_bits * chips


def assemble_frame(
    payload: bytes,
    mode: OperatingMode,
    dimming_level: int = 100,
    mhr: Mhr | None = None,
    topology: int = 0,
) -> Frame:
    """Build the full chip-domain frame for a payload."""
    payload = bytes(payload)
    if len(payload) > MAX_PSDU_OCTETS:
        msg = f"payload of {len(payload)} octets exceeds {MAX_PSDU_OCTETS}"
        raise FramingError(msg)
    mhr = mhr or Mhr()
    psdu = mhr.to_bytes() + payload
    phr = Phr(
        phy=mode.phy,
        mode_index=mode.index,
        psdu_length=len(psdu),
        dimming_level=dimming_level,
    )
    coded = fec_encode(bits_from_bytes(psdu), mode)
    data_bits, _ = line_expansion(mode.line_code)
    if coded.size % data_bits:
        coded = np.concatenate(
            [coded, np.zeros(data_bits - coded.size % data_bits, dtype=np.uint8)]
        )
    psdu_chips = line_encode(mode.line_code, coded)
    return Frame(
        mode=mode,
        phr=phr,
        mhr=mhr,
        payload=payload,
        shr_chips=shr_bits(topology),
        phr_chips=encode_phr(phr, mode),
        psdu_chips=psdu_chips,
        topology=topology,
    )


def frame_chip_layout(mode: OperatingMode, payload_octets: int) -> tuple[int, int, int]:
    """(SHR, PHR, PSDU) section lengths in chips, closed form."""
    return (
        SHR_BITS,
        phr_chip_count(mode.phy, phr_line_code(mode)),
        psdu_chip_count(mode, payload_octets + MHR_OCTETS),
    )


def frame_overhead(mode: OperatingMode, payload_octets: int) -> tuple[int, float]:
    """Total chip count of a frame and its payload efficiency.

    Efficiency tends to the product of the line, RS and convolutional code
    rates as the payload grows.
    """
    shr, phr, psdu = frame_chip_layout(mode, payload_octets)
    total = shr + phr + psdu
    return total, (payload_octets * 8) / total if total else 0.0


def unpack_psdu(bits, psdu_length: int) -> tuple[Mhr, bytes]:
    """Split decoded PSDU bits into the MAC header and payload."""
    data = bytes_from_bits(as_bits(bits)[: psdu_length * 8])
    if len(data) < MHR_OCTETS:
        msg = f"PSDU of {len(data)} octets cannot hold the {MHR_OCTETS}-octet MHR"
        raise FramingError(msg)
    return Mhr.from_bytes(data[:MHR_OCTETS]), data[MHR_OCTETS:]


def hex_dump(frame: Frame) -> str:
    """Section-labelled hex dump, 64 chips per line, MSB-first nibbles."""
    lines = []
    for name, chips in (
        ("SHR", frame.shr_chips),
        ("PHR", frame.phr_chips),
        ("PSDU", frame.psdu_chips),
    ):
        lines.append(f"{name} ({chips.size} bits)")
        for start in range(0, chips.size, 64):
            group = chips[start : start + 64]
            pad = (-group.size) % 4
            padded = np.concatenate([group, np.zeros(pad, dtype=np.uint8)])
            value = "".join(f"{int_from_bits(padded[i:i+4]):x}" for i in range(0, padded.size, 4))
            lines.append(f"  {start:06d}  {value}")
    return "\n".join(lines)
