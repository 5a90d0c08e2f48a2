"""Acceptance gate: one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
Every check here is an end-to-end property of the public API; tolerances are
pinned in each test and never loosened to fit the implementation.
"""

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from vlcphy.channel import illuminance_at, lambertian_order
from vlcphy.fec.convolutional import ConvolutionalCode, cc_encode, viterbi_decode
from vlcphy.fec.reed_solomon import rs_code_for, rs_decode, rs_encode
from vlcphy.harness import (
    SweepSpec,
    analytic_ook_ber,
    ber_sweep,
    run_loopback,
    send_file,
    throughput_check,
    wilson_interval,
)
from vlcphy.channel import ChannelConfig
from vlcphy.modem import (
    DimmingConfig,
    OokDimming,
    Waveform,
    compensation_plan,
    ook_demodulate,
    ook_modulate,
    vppm_modulate,
)
from vlcphy.modes import Phy, list_modes, lookup_mode
from vlcphy.receiver import recover_timing
from vlcphy.rll import (
    decode_4b6b,
    decode_8b10b,
    encode_4b6b,
    encode_8b10b,
    manchester_decode,
    manchester_encode,
)
from vlcphy.bitops import bits_from_bytes, bits_from_int, int_from_bits, max_run_length


class _gate:
    """Print one `[label] PASS/FAIL` line when the enclosed checks finish."""

    def __init__(self, label: str):
        self.label = label
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            suffix = f" - {self.detail}" if self.detail else ""
            print(f"\n[{self.label}] PASS{suffix}")
        else:
            print(f"\n[{self.label}] FAIL - {exc}")
        return False


# --------------------------------------------------------------------------
# 1. mode table: every nominal data rate to four significant digits


def test_criterion_1_mode_table_rates():
    printed = [
        11.67e3, 24.44e3, 48.89e3, 73.3e3, 100e3,
        35.56e3, 71.11e3, 124.4e3, 266.6e3,
        1.25e6, 2e6, 2.5e6, 4e6, 5e6, 6e6, 9.6e6,
        12e6, 19.2e6, 24e6, 38.4e6, 48e6, 76.8e6, 96e6,
    ]
    with _gate("criterion 1") as g:
        t0 = time.perf_counter()
        modes = list_modes()
        assert len(modes) == 23
        worst = 0.0
        for mode, nominal in zip(modes, printed):
            rate = float(mode.data_rate)
            rel = abs(rate - nominal) / nominal
            worst = max(worst, rel)
            assert rel < 5e-4, f"{mode.label}: {rate} vs printed {nominal}"
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0
        g.detail = f"23/23 rates within {worst:.2e} relative error in {elapsed * 1e3:.0f} ms"


# --------------------------------------------------------------------------
# 2. bit-exact loopback over every mode x dimming x payload size


def test_criterion_2_loopback_grid():
    rng = np.random.default_rng(2024)
    payloads = {
        0: b"",
        64: bytes(rng.integers(0, 256, 64, dtype=np.uint8).tolist()),
        4096: bytes(rng.integers(0, 256, 4096, dtype=np.uint8).tolist()),
    }
    with _gate("criterion 2") as g:
        t0 = time.perf_counter()
        runs = 0
        for mode in list_modes():
            for level in (30, 50, 70):
                dimming = DimmingConfig(level=level)
                for size, payload in payloads.items():
                    res = run_loopback(mode, payload, dimming=dimming)
                    assert res.ok, (
                        f"{mode.label} dimming {level}% payload {size}: "
                        f"{res.error or 'payload mismatch'}"
                    )
                    assert res.report.payload == payload
                    assert res.chip_errors == 0
                    runs += 1
        elapsed = time.perf_counter() - t0
        assert runs == 23 * 3 * 3
        assert elapsed < 300.0
        g.detail = f"{runs}/207 loopbacks bit-exact in {elapsed:.1f} s"


# --------------------------------------------------------------------------
# 3. Reed-Solomon exhaustive single/double correction


def test_criterion_3_rs_exhaustive():
    with _gate("criterion 3") as g:
        code11 = rs_code_for((15, 11))
        message = np.arange(11) % 16
        codeword = rs_encode(message, code11)
        cases = 0
        for pos in range(15):
            for val in range(1, 16):
                received = codeword.copy()
                received[pos] ^= val
                decoded, corrected = rs_decode(received, code11)
                assert np.array_equal(decoded, message)
                assert corrected == 1
                cases += 1
        for p1, p2 in itertools.combinations(range(15), 2):
            for v1 in range(1, 16):
                for v2 in range(1, 16):
                    received = codeword.copy()
                    received[p1] ^= v1
                    received[p2] ^= v2
                    decoded, corrected = rs_decode(received, code11)
                    assert np.array_equal(decoded, message)
                    assert corrected == 2
                    cases += 1
        assert cases == 15 * 15 + 105 * 225  # 225 singles + 23,625 doubles

        code7 = rs_code_for((15, 7))
        rng = np.random.default_rng(3)
        message7 = rng.integers(0, 16, 7)
        codeword7 = rs_encode(message7, code7)
        random_cases = 10_000
        for _ in range(random_cases):
            weight = int(rng.integers(1, 5))
            positions = rng.choice(15, size=weight, replace=False)
            received = codeword7.copy()
            for pos in positions:
                received[pos] ^= int(rng.integers(1, 16))
            decoded, corrected = rs_decode(received, code7)
            assert np.array_equal(decoded, message7)
            assert corrected == weight
        g.detail = f"{cases} exhaustive RS(15,11) + {random_cases} random RS(15,7) corrections, 0 failures"


# --------------------------------------------------------------------------
# 4. Viterbi equals brute-force maximum likelihood


def test_criterion_4_viterbi_is_ml():
    rates = (Fraction(1, 3), Fraction(1, 4), Fraction(2, 3))
    with _gate("criterion 4") as g:
        noiseless = 0
        flipped = 0
        for rate in rates:
            code = ConvolutionalCode(rate)
            for length in range(11):
                n_messages = 1 << length
                messages = [bits_from_int(m, length) for m in range(n_messages)]
                codebook = np.stack([cc_encode(m, code) for m in messages])
                n = codebook.shape[1]
                for idx, message in enumerate(messages):
                    clean = codebook[idx]
                    assert np.array_equal(viterbi_decode(clean, code), message)
                    noiseless += 1
                    # deterministic 1- and 2-bit flip patterns per message,
                    # spread over all positions as idx varies
                    patterns = [
                        (idx % n,),
                        ((idx * 7 + 3) % n,),
                        (idx % n, (idx + n // 2) % n),
                        ((idx * 5) % n, (idx * 5 + 1 + idx % (n - 1)) % n),
                    ]
                    for flips in patterns:
                        if len(set(flips)) != len(flips):
                            continue
                        received = clean.copy()
                        received[list(flips)] ^= 1
                        decoded = viterbi_decode(received, code)
                        dist = int((codebook[int_from_bits(decoded)] != received).sum())
                        ml = int((codebook != received).sum(axis=1).min())
                        assert dist == ml, f"rate {rate} len {length}: {dist} > ML {ml}"
                        flipped += 1
        g.detail = (
            f"{noiseless} noiseless messages exact, "
            f"{flipped} flip patterns at the ML distance, rates 1/3 1/4 2/3"
        )


# --------------------------------------------------------------------------
# 5. run-length-limited line-code conformance


def test_criterion_5_rll_conformance():
    with _gate("criterion 5") as g:
        # Manchester: exhaustive, perfectly balanced
        for word in range(4):
            bits = bits_from_int(word, 2)
            chips = manchester_encode(bits)
            assert np.array_equal(manchester_decode(chips), bits)
            assert chips.sum() * 2 == chips.size
        # 4B6B: exhaustive roundtrip, every codeword weight 3 in 6
        words = []
        for value in range(16):
            bits = bits_from_int(value, 4)
            chips = encode_4b6b(bits)
            assert chips.size == 6 and chips.sum() == 3
            assert np.array_equal(decode_4b6b(chips), bits)
            words.append(tuple(chips))
        assert len(set(words)) == 16
        # 8B10B: randomized byte strings, disparity and run-length bounds
        rng = np.random.default_rng(5)
        strings = 10_000
        max_run = 0
        for _ in range(strings):
            data = rng.integers(0, 256, int(rng.integers(1, 17)), dtype=np.uint8)
            bits = bits_from_bytes(data.tobytes())
            rd0 = -1 if rng.integers(0, 2) == 0 else 1
            chips, rd_out = encode_8b10b(bits, rd0)
            decoded, _ = decode_8b10b(chips, rd0)
            assert np.array_equal(decoded, bits)
            disparity = rd0 + 2 * np.cumsum(chips.astype(np.int64)) - np.arange(1, chips.size + 1)
            boundary = disparity[9::10]
            assert set(np.unique(boundary)) <= {-1, 1}
            assert rd_out == boundary[-1]
            run = max_run_length(chips)
            assert run <= 5
            max_run = max(max_run, run)
        g.detail = (
            f"Manchester+4B6B exhaustive, {strings} 8B10B strings: "
            f"disparity in {{-1,+1}}, max run {max_run} <= 5"
        )


# --------------------------------------------------------------------------
# 6. dimming contract: exact VPPM means, half-rate compensation


def test_criterion_6_dimming_contract():
    with _gate("criterion 6") as g:
        rng = np.random.default_rng(6)
        bits = rng.integers(0, 2, 2000)
        for level in range(10, 100, 10):
            wave = vppm_modulate(bits, 10, 400e3, DimmingConfig(level=level))
            assert wave.samples.mean() == level / 100, f"VPPM mean at {level}%"

        dimming = DimmingConfig(
            level=25, ook_method=OokDimming.COMPENSATION, compensation_brightness=0
        )
        plan = compensation_plan(2048, dimming)
        assert plan.fraction == 0.5

        mode = lookup_mode(Phy.PHY1, 4)  # 100 kb/s uncoded OOK
        duration = 50_000_000  # long horizon so whole-frame quantization is negligible
        half_nominal = 0.5 * float(mode.data_rate)
        dimmed = throughput_check(mode, duration, payload_octets=4096, dimming=dimming)
        rel = abs(dimmed - half_nominal) / half_nominal
        assert rel <= 0.02, f"compensated throughput {dimmed:.0f} b/s vs {half_nominal:.0f}"
        g.detail = (
            "9/9 VPPM means exact, compensation fraction 0.5, "
            f"dimmed throughput {dimmed:.0f} b/s within {rel * 100:.2f}% of half nominal"
        )


# --------------------------------------------------------------------------
# 7. timing recovery equals exhaustive search; >= 99% at sigma = 0.1


def test_criterion_7_timing_recovery():
    with _gate("criterion 7") as g:
        oversample = 8
        pulse = np.array([0.1, 0.2, 0.4, 0.7, 1.0, 0.7, 0.4, 0.2])
        true_phase = int(np.argmax(pulse))
        chips = np.tile([1.0, -1.0], 64)
        clean = 0.5 + 0.5 * np.outer(chips, pulse).ravel()  # unit swing at the peak
        trials = 1000
        correct = 0
        for seed in range(trials):
            rng = np.random.default_rng(seed)
            samples = clean + rng.normal(0.0, 0.1, clean.size)
            wave = Waveform(samples, 1.6e6, oversample)
            phase = recover_timing(wave)
            # exhaustive reference: per-phase energy after DC removal
            z = samples - samples.mean()
            n_chips = samples.size // oversample
            energies = [
                float((z[: n_chips * oversample].reshape(n_chips, oversample)[:, p] ** 2).sum())
                for p in range(oversample)
            ]
            assert phase == int(np.argmax(energies)), f"seed {seed}: not the energy argmax"
            correct += phase == true_phase
        assert correct >= 990, f"only {correct}/1000 correct phases"
        g.detail = f"1000/1000 match exhaustive search, {correct}/1000 true phase at sigma=0.1"


# --------------------------------------------------------------------------
# 8. uncoded OOK BER vs analytic oracle; coded FER never worse


def test_criterion_8_ber_statistics():
    snr_points = (10.3, 11.8, 12.8)
    with _gate("criterion 8") as g:
        oversample = 2
        chips_per_point = 1_000_000
        details = []
        rng = np.random.default_rng(8)
        for snr_db in snr_points:
            sigma = 10 ** (-snr_db / 20)
            chips = rng.integers(0, 2, chips_per_point)
            wave = ook_modulate(chips, oversample, 200e3)
            noisy = Waveform(
                wave.samples + rng.normal(0.0, sigma, wave.samples.size),
                wave.sample_rate,
                oversample,
            )
            decided = ook_demodulate(noisy, threshold=0.5)
            errors = int((decided != chips).sum())
            lo, hi = wilson_interval(errors, chips_per_point)
            predicted = analytic_ook_ber(sigma, oversample=oversample)
            assert lo <= predicted <= hi, (
                f"{snr_db} dB: measured {errors / chips_per_point:.3e} "
                f"[{lo:.3e}, {hi:.3e}] vs analytic {predicted:.3e}"
            )
            details.append(f"{snr_db}dB:{errors / chips_per_point:.2e}~{predicted:.2e}")

        base = dict(
            snr_points_db=snr_points,
            frames_per_point=40,
            payload_octets=256,
            oversample=oversample,
            seed=88,
        )
        uncoded = ber_sweep(SweepSpec(mode=lookup_mode(Phy.PHY1, 4), **base))
        coded = ber_sweep(SweepSpec(mode=lookup_mode(Phy.PHY1, 0), **base))
        for pu, pc in zip(uncoded.points, coded.points):
            assert pc.fer <= pu.fer, (
                f"{pu.snr_db} dB: coded FER {pc.fer} > uncoded {pu.fer}"
            )
        fer_pairs = ", ".join(
            f"{pu.snr_db}dB {pc.fer:.2f}<={pu.fer:.2f}"
            for pu, pc in zip(uncoded.points, coded.points)
        )
        g.detail = f"chip rate in Wilson band at {'; '.join(details)}; coded<=uncoded FER {fer_pairs}"


# --------------------------------------------------------------------------
# 9. photometric reference values


def test_criterion_9_photometry():
    with _gate("criterion 9") as g:
        order = lambertian_order(60.0)
        assert abs(order - 1.0) < 1e-12
        near = illuminance_at(430.0, 1.5)
        far = illuminance_at(430.0, 4.0)
        assert near == pytest.approx(191.1, abs=0.05)
        assert far == pytest.approx(26.9, abs=0.05)
        # inverse-square consistency
        assert near / far == pytest.approx((4.0 / 1.5) ** 2, rel=1e-12)
        g.detail = f"m(60deg)={order:.15f}, 430 cd -> {near:.1f} lux @1.5 m, {far:.1f} lux @4 m"


# --------------------------------------------------------------------------
# digest-verified file transfer at every PHY-I mode (companion requirement)


def test_sendfile_demo_every_phy1_mode():
    channel = ChannelConfig(gain=0.9, ambient_dc=0.05, noise_sigma=0.01)
    rng = np.random.default_rng(99)
    data = bytes(rng.integers(0, 256, 3000, dtype=np.uint8).tolist())
    with _gate("sendfile demo") as g:
        for mode in list_modes(Phy.PHY1):
            result = send_file(data, mode, channel, chunk_octets=1024, seed=mode.index)
            assert result.ok, f"{mode.label}: {result.frames_recovered}/{result.frames_sent}"
            assert result.digest_received == result.digest_sent
        g.detail = "9/9 PHY-I modes moved 3000 octets digest-verified through a noisy channel"
