"""Frame assembly: preambles, header integrity, chip layout, hex dump."""

import numpy as np
import pytest

from vlcphy.bitops import bits_from_bytes
from vlcphy.errors import (
    ConfigError,
    FramingError,
    HeaderCorruptError,
    UnknownModeError,
)
from vlcphy.framing import (
    FLP,
    MAX_PSDU_OCTETS,
    MHR_OCTETS,
    N_TOPOLOGIES,
    PHR_BITS,
    PHR_INFO_BITS,
    SHR_BITS,
    TDP_PATTERNS,
    Frame,
    Mhr,
    Phr,
    assemble_frame,
    build_phr,
    crc16,
    decode_phr,
    encode_phr,
    frame_chip_layout,
    frame_overhead,
    hex_dump,
    parse_phr,
    phr_chip_count,
    phr_line_code,
    shr_bits,
    unpack_psdu,
)
from vlcphy.modes import Phy, list_modes, lookup_mode


# ----------------------------------------------------------------- preambles


def test_flp_is_64_alternating_chips():
    assert FLP.size == 64
    np.testing.assert_array_equal(FLP, np.tile([0, 1], 32))


def test_tdp_patterns_are_distinct_shifts_of_one_sequence():
    assert len(TDP_PATTERNS) == N_TOPOLOGIES
    base = TDP_PATTERNS[0][:15]
    for k in range(N_TOPOLOGIES):
        assert TDP_PATTERNS[k].size == 60
        np.testing.assert_array_equal(TDP_PATTERNS[k], np.tile(TDP_PATTERNS[k][:15], 4))
        np.testing.assert_array_equal(TDP_PATTERNS[k][:15], np.roll(base, -4 * k))
    assert len({tuple(p) for p in TDP_PATTERNS}) == N_TOPOLOGIES


def test_tdp_cross_correlation_is_low():
    signed = np.stack(TDP_PATTERNS).astype(np.int64) * 2 - 1
    for a in range(N_TOPOLOGIES):
        for b in range(N_TOPOLOGIES):
            dot = int(signed[a] @ signed[b])
            if a == b:
                assert dot == 60
            else:
                assert dot == -4  # m-sequence shift property, 4 repeats of -1


def test_shr_is_flp_then_tdp():
    for k in range(N_TOPOLOGIES):
        chips = shr_bits(k)
        assert chips.size == SHR_BITS == 124
        np.testing.assert_array_equal(chips[:64], FLP)
        np.testing.assert_array_equal(chips[64:], TDP_PATTERNS[k])
    with pytest.raises(ConfigError):
        shr_bits(4)


# ----------------------------------------------------------------------- CRC


def test_crc16_check_value():
    # standard check input "123456789" for this polynomial/init combination
    assert crc16(bits_from_bytes(b"123456789")) == 0x29B1


def test_crc16_detects_any_single_flip():
    rng = np.random.default_rng(40)
    bits = rng.integers(0, 2, 31, dtype=np.uint8)
    reference = crc16(bits)
    for pos in range(bits.size):
        mutated = bits.copy()
        mutated[pos] ^= 1
        assert crc16(mutated) != reference


# ----------------------------------------------------------------------- PHR


def test_phr_roundtrip():
    phr = Phr(phy=Phy.PHY2, mode_index=9, psdu_length=1027, dimming_level=37)
    bits = build_phr(phr)
    assert bits.size == PHR_BITS == 47
    assert parse_phr(bits) == phr


def test_phr_any_single_bit_flip_is_caught():
    phr = Phr(phy=Phy.PHY1, mode_index=3, psdu_length=300, dimming_level=70)
    bits = build_phr(phr)
    for pos in range(PHR_BITS):
        mutated = bits.copy()
        mutated[pos] ^= 1
        with pytest.raises((HeaderCorruptError, UnknownModeError)):
            parse_phr(mutated)


def test_phr_unknown_mode_index():
    phr = Phr(phy=Phy.PHY1, mode_index=12, psdu_length=10, dimming_level=50)
    with pytest.raises(UnknownModeError):
        parse_phr(build_phr(phr))


def test_phr_field_limits():
    with pytest.raises(ConfigError):
        build_phr(Phr(Phy.PHY1, 32, 0, 50))
    with pytest.raises(ConfigError):
        build_phr(Phr(Phy.PHY1, 0, MAX_PSDU_OCTETS + MHR_OCTETS + 1, 50))
    with pytest.raises(ConfigError):
        build_phr(Phr(Phy.PHY1, 0, 0, 101))
    with pytest.raises(FramingError):
        parse_phr(np.zeros(46, dtype=np.uint8))


def test_phr_info_layout():
    assert PHR_INFO_BITS == 31
    phr = Phr(phy=Phy.PHY2, mode_index=0b10101, psdu_length=0xABCD, dimming_level=0b1100100)
    bits = build_phr(phr)
    assert bits[0] == 1  # PHY type bit
    assert bits[1:6].tolist() == [1, 0, 1, 0, 1]
    assert bits[6:22].tolist() == [int(c) for c in format(0xABCD, "016b")]
    assert bits[22:29].tolist() == [int(c) for c in format(100, "07b")]


@pytest.mark.parametrize("mode", list_modes(), ids=lambda m: m.label)
def test_phr_chip_roundtrip_every_mode(mode):
    phr = Phr(
        phy=mode.phy,
        mode_index=mode.index,
        psdu_length=500,
        dimming_level=60,
    )
    chips = encode_phr(phr, mode)
    assert chips.size == phr_chip_count(mode.phy, phr_line_code(mode))
    decoded, corrected = decode_phr(chips, mode.phy, phr_line_code(mode))
    assert decoded == phr
    assert corrected == 0


def test_phr_coding_survives_chip_errors():
    mode = lookup_mode(Phy.PHY1, 3)
    phr = Phr(Phy.PHY1, 3, 64, 50)
    chips = encode_phr(phr, mode)
    rng = np.random.default_rng(41)
    corrupted = chips.copy()
    flips = rng.choice(chips.size, size=chips.size // 100, replace=False)
    corrupted[flips] ^= 1  # 1% chip errors against Manchester + CC 1/4 + RS
    decoded, _ = decode_phr(corrupted, Phy.PHY1, phr_line_code(mode))
    assert decoded == phr


# ----------------------------------------------------------------------- MHR


def test_mhr_roundtrip_and_size():
    mhr = Mhr(frame_control=0x1234, sequence_number=200)
    data = mhr.to_bytes()
    assert len(data) == MHR_OCTETS == 3
    assert Mhr.from_bytes(data) == mhr
    with pytest.raises(FramingError):
        Mhr(sequence_number=256).to_bytes()
    with pytest.raises(FramingError):
        Mhr.from_bytes(b"\x00\x00")


# --------------------------------------------------------------- full frames


@pytest.mark.parametrize("mode", list_modes(), ids=lambda m: m.label)
def test_assembled_layout_matches_prediction(mode):
    rng = np.random.default_rng(42)
    payload = rng.integers(0, 256, 37, dtype=np.uint8).tobytes()
    frame = assemble_frame(payload, mode, dimming_level=40)
    shr, phr, psdu = frame_chip_layout(mode, len(payload))
    assert frame.shr_chips.size == shr
    assert frame.phr_chips.size == phr
    assert frame.psdu_chips.size == psdu
    assert frame.total_chips == shr + phr + psdu
    # offsets mark (PHR start, PSDU start, frame end)
    assert frame.section_offsets == (shr, shr + phr, shr + phr + psdu)
    assert frame.chips.size == frame.total_chips


def test_frame_carries_mhr_and_payload():
    mode = lookup_mode(Phy.PHY1, 2)
    frame = assemble_frame(b"payload!", mode, mhr=Mhr(sequence_number=9))
    assert frame.phr.psdu_length == len(b"payload!") + MHR_OCTETS
    assert frame.mhr.sequence_number == 9
    assert frame.mode is mode


def test_empty_payload_has_mhr_only_psdu():
    mode = lookup_mode(Phy.PHY2, 4)
    frame = assemble_frame(b"", mode)
    assert frame.phr.psdu_length == MHR_OCTETS


def test_oversize_payload_rejected():
    mode = lookup_mode(Phy.PHY1, 0)
    with pytest.raises(FramingError):
        assemble_frame(b"x" * (MAX_PSDU_OCTETS + 1), mode)


def test_bad_topology_rejected():
    mode = lookup_mode(Phy.PHY1, 0)
    with pytest.raises(ConfigError):
        assemble_frame(b"", mode, topology=4)


def test_unpack_psdu_roundtrip():
    mode = lookup_mode(Phy.PHY1, 4)
    payload = b"roundtrip body"
    frame = assemble_frame(payload, mode, mhr=Mhr(sequence_number=77))
    psdu_bits = np.concatenate(
        [bits_from_bytes(Mhr(sequence_number=77).to_bytes()), bits_from_bytes(payload)]
    )
    mhr, recovered = unpack_psdu(psdu_bits, len(payload) + MHR_OCTETS)
    assert mhr.sequence_number == 77
    assert recovered == payload
    assert frame.phr.psdu_length == len(payload) + MHR_OCTETS


@pytest.mark.parametrize(
    "mode",
    [lookup_mode(Phy.PHY1, 0), lookup_mode(Phy.PHY1, 4), lookup_mode(Phy.PHY2, 9)],
    ids=lambda m: m.label,
)
def test_overhead_efficiency_limit_is_the_coding_rate_product(mode):
    _, small_eff = frame_overhead(mode, 16)
    _, big_eff = frame_overhead(mode, 100_000)
    assert small_eff < big_eff
    limit = float(mode.line_code.ratio * mode.rs_ratio * mode.cc_ratio)
    assert abs(big_eff - limit) / limit < 0.01


def test_overhead_zero_payload_zero_efficiency():
    total, eff = frame_overhead(lookup_mode(Phy.PHY1, 4), 0)
    assert eff == 0.0
    assert total > 0


def test_hex_dump_sections_and_width():
    mode = lookup_mode(Phy.PHY1, 3)
    frame = assemble_frame(b"dump me", mode)
    dump = hex_dump(frame)
    for section in ("SHR", "PHR", "PSDU"):
        assert section in dump
    body_lines = [l for l in dump.splitlines() if l.startswith("  ")]
    for line in body_lines:
        offset, word = line.split()
        assert len(word) <= 16  # 64 chips per line, 4 chips per hex digit
        int(offset)  # offsets are decimal chip counts
    assert body_lines[0].split()[1].startswith("5555")  # alternating preamble


def test_frames_are_immutable():
    mode = lookup_mode(Phy.PHY1, 0)
    frame = assemble_frame(b"", mode)
    assert isinstance(frame, Frame)
    with pytest.raises(AttributeError):
        frame.topology = 1
