"""Receive chain: frame detection, timing recovery, staged frame decode.

Detection slides a zero-mean normalized correlator for each of the four
synchronization-header templates over the incoming samples; timing recovery
picks the sampling phase that maximizes the oversampled energy after DC
removal. Frame decoding then proceeds in stages (header, mode, payload),
each failing with its own error type carrying the partial report.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace

import numpy as np
from scipy.signal import fftconvolve

from .errors import (
    FramingError,
    HeaderCorruptError,
    NoFrameError,
    PayloadDecodeError,
    UnknownModeError,
)
from .fec import FecReport
from .framing import (
    MHR_OCTETS,
    N_TOPOLOGIES,
    SHR_BITS,
    Mhr,
    Phr,
    decode_phr,
    phr_chip_count,
    phr_line_code,
    phr_modulation,
    psdu_chip_count,
    shr_bits,
    unpack_psdu,
)
from .fec import fec_decode, fec_encoded_length
from .errors import DecodeFailure
from .modem import (
    DimmingConfig,
    OokDimming,
    Waveform,
    compensation_plan,
    ook_demodulate,
    strip_compensation,
    vppm_demodulate,
)
from .modes import LineCode, Modulation, OperatingMode, Phy, lookup_mode
from .rll import line_decode_nearest

DETECTION_THRESHOLD = 0.9
MIN_TIMING_CHIPS = 64


@dataclass(frozen=True)
class SyncResult:
    """Where a frame starts and which topology pattern announced it."""

    frame_start: int
    topology: int
    score: float


@dataclass
class RxReport:
    """Everything the receive chain learned about one frame."""

    sync: SyncResult | None = None
    timing_phase: int | None = None
    phr: Phr | None = None
    mode: OperatingMode | None = None
    mhr: Mhr | None = None
    payload: bytes | None = None
    fec: FecReport | None = None
    phr_corrected: int = 0
    psdu_chips: np.ndarray | None = None
    frame_end: int | None = None
    stages: dict[str, bool] = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.stages) and all(self.stages.values())


def _shr_template(oversample: int, topology: int) -> np.ndarray:
    chips = shr_bits(topology).astype(np.float64)
    template = np.repeat(chips, oversample)
    template -= template.mean()
    return template


def detect_frame(wave: Waveform, threshold: float = DETECTION_THRESHOLD) -> SyncResult:
    """Earliest index whose normalized correlation clears the threshold.

    The score is invariant to gain and DC offset; the returned index is the
    correlation maximum within one preamble length of the first crossing.
    """
    x = wave.samples
    n = wave.oversample
    t_len = SHR_BITS * n
    if x.size < t_len:
        msg = "waveform shorter than the synchronization header"
        raise NoFrameError(msg)

    # windowed mean/energy via cumulative sums, shared by all templates
    cs = np.concatenate([[0.0], np.cumsum(x)])
    cs2 = np.concatenate([[0.0], np.cumsum(x * x)])
    win_sum = cs[t_len:] - cs[:-t_len]
    win_sq = cs2[t_len:] - cs2[:-t_len]
    energy = np.maximum(win_sq - win_sum * win_sum / t_len, 0.0)

    scores = np.empty((N_TOPOLOGIES, x.size - t_len + 1))
    for k in range(N_TOPOLOGIES):
        template = _shr_template(n, k)
        norm = np.sqrt(energy * float(np.dot(template, template)))
        corr = fftconvolve(x, template[::-1], mode="valid")
        with np.errstate(divide="ignore", invalid="ignore"):
            scores[k] = np.where(norm > 1e-12, corr / np.maximum(norm, 1e-300), 0.0)

    best = scores.max(axis=0)
    hits = np.flatnonzero(best >= threshold)
    if hits.size == 0:
        msg = f"no correlation peak reached threshold {threshold}"
        raise NoFrameError(msg)
    # The 64-chip alternating preamble is period-2, so correlation sidelobes
    # at even chip offsets decay slowly; a low threshold can first cross on a
    # sidelobe well before the true peak. Search one preamble length past the
    # first crossing for the actual maximum.
    first = int(hits[0])
    window = best[first : first + 64 * n]
    start = first + int(np.argmax(window))
    topology = int(np.argmax(scores[:, start]))
    return SyncResult(frame_start=start, topology=topology, score=float(best[start]))


def recover_timing(wave: Waveform) -> int:
    """Sampling phase maximizing sum_k x[k*N + p]^2 after DC removal.

    Ties resolve to the smallest phase. Needs at least MIN_TIMING_CHIPS
    full chip periods of signal.
    """
    n = wave.oversample
    x = wave.samples
    n_chips = x.size // n
    if n_chips < MIN_TIMING_CHIPS:
        msg = f"timing recovery needs {MIN_TIMING_CHIPS} chip periods, got {n_chips}"
        raise FramingError(msg)
    x = x - x.mean()
    trimmed = x[: n_chips * n]
    energy = (trimmed.reshape(n_chips, n) ** 2).sum(axis=0)
    return int(np.argmax(energy))


def _slicer_threshold(shr_samples: np.ndarray, oversample: int) -> float:
    """Midpoint of the on/off levels learned from the known SHR chips."""
    chips = shr_bits(0)  # FLP half is topology-independent; use full pattern
    means = shr_samples.reshape(SHR_BITS, oversample).mean(axis=1)
    return 0.5 * (means[chips == 1].mean() + means[chips == 0].mean())


def _phr_candidates(phy: Phy) -> list[tuple[Modulation, LineCode]]:
    if phy is Phy.PHY1:
        return [(Modulation.OOK, LineCode.MANCHESTER)]
    return [(Modulation.OOK, LineCode.EIGHT_TEN), (Modulation.VPPM, LineCode.FOUR_SIX)]


def receive_frame(
    wave: Waveform,
    phy: Phy | str,
    dimming: DimmingConfig | None = None,
    threshold: float = DETECTION_THRESHOLD,
) -> RxReport:
    """Full staged receive: detect, time, decode header, decode payload.

    Raises NoFrameError, HeaderCorruptError, UnknownModeError or
    PayloadDecodeError; each carries the report assembled so far.
    """
    phy = Phy.parse(phy)
    report = RxReport()
    n = wave.oversample

    try:
        sync = detect_frame(wave, threshold)
    except NoFrameError as exc:
        report.stages["detect"] = False
        exc.report = report
        raise
    report.sync = sync
    report.stages["detect"] = True
    start = sync.frame_start

    shr_span = SHR_BITS * n
    shr_samples = wave.samples[start : start + shr_span]
    # topology-correct template for level learning; timing from the same span
    report.timing_phase = recover_timing(Waveform(shr_samples, wave.sample_rate, n))
    report.stages["timing"] = True
    slicer = _slicer_threshold(shr_samples, n)

    phr_error: Exception | None = None
    phr = None
    used_line = None
    for modulation, line in _phr_candidates(phy):
        n_chips = phr_chip_count(phy, line)
        span = n_chips * n
        section = wave.samples[start + shr_span : start + shr_span + span]
        if section.size < span:
            phr_error = phr_error or HeaderCorruptError("frame truncated inside the header")
            continue
        section_wave = Waveform(section, wave.sample_rate, n)
        if modulation is Modulation.OOK:
            chips = ook_demodulate(section_wave, threshold=slicer)
        else:
            chips = vppm_demodulate(section_wave)
        try:
            candidate, corrected = decode_phr(chips, phy, line)
        except (HeaderCorruptError, UnknownModeError) as exc:
            # keep the strongest verdict: a CRC-valid unknown mode wins over
            # a failed candidate path
            if isinstance(exc, UnknownModeError) or phr_error is None:
                phr_error = exc
            continue
        if candidate.phy is phy:
            phr = candidate
            used_line = line
            report.phr_corrected = corrected
            break
        phr_error = HeaderCorruptError("header announces a different PHY")
    if phr is None:
        report.stages["phr"] = False
        err = phr_error or HeaderCorruptError("header not decodable")
        err.report = report
        raise err
    report.phr = phr
    report.stages["phr"] = True

    mode = lookup_mode(phy, phr.mode_index)
    if phr_line_code(mode) is not used_line:
        report.stages["mode"] = False
        err = HeaderCorruptError("header decoded under the wrong base line code")
        err.report = report
        raise err
    report.mode = mode
    report.stages["mode"] = True

    psdu_octets = phr.psdu_length
    data_chips = psdu_chip_count(mode, psdu_octets)
    plan = None
    if (
        dimming is not None
        and mode.modulation is Modulation.OOK
        and dimming.ook_method is OokDimming.COMPENSATION
        and phr.dimming_level != 50
    ):
        plan = compensation_plan(data_chips, replace(dimming, level=phr.dimming_level))
    section_chips = data_chips + (plan.total_compensation if plan else 0)
    psdu_start = start + shr_span + phr_chip_count(phy, used_line) * n
    span = section_chips * n
    section = wave.samples[psdu_start : psdu_start + span]
    if section.size < span:
        report.stages["psdu"] = False
        err = PayloadDecodeError("frame truncated inside the payload section")
        err.report = report
        raise err
    section_wave = Waveform(section, wave.sample_rate, n)
    if mode.modulation is Modulation.OOK:
        chips = ook_demodulate(section_wave, threshold=slicer)
    else:
        chips = vppm_demodulate(section_wave)
    if plan is not None:
        chips = strip_compensation(chips, plan)
    report.psdu_chips = chips

    coded_bits = line_decode_nearest(mode.line_code, chips)
    expected = fec_encoded_length(psdu_octets * 8, mode)
    try:
        psdu_bits, fec_report = fec_decode(coded_bits[:expected], mode, psdu_octets * 8)
    except DecodeFailure as exc:
        report.fec = exc.report
        report.stages["psdu"] = False
        err = PayloadDecodeError(f"payload error correction failed: {exc}")
        err.report = report
        raise err
    report.fec = fec_report
    try:
        mhr, payload = unpack_psdu(psdu_bits, psdu_octets)
    except FramingError as exc:
        report.stages["psdu"] = False
        err = PayloadDecodeError(str(exc))
        err.report = report
        raise err
    report.mhr = mhr
    report.payload = payload
    report.frame_end = psdu_start + span
    report.stages["psdu"] = True
    return report
