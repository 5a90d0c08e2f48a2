"""Pydantic request/response models for the HTTP service.

Waveform samples travel as base64-encoded float32 little-endian bytes so
payloads stay JSON while round-tripping bit-exactly with the on-disk format.
"""

from __future__ import annotations

import base64

import numpy as np
from pydantic import BaseModel, Field

from ..channel import ChannelConfig
from ..modem import DimmingConfig, OokDimming, Waveform
from ..modes import OperatingMode


class ModeRecord(BaseModel):
    phy: str
    index: int
    modulation: str
    rll: str
    clock_hz: float
    rs_n: int | None
    rs_k: int | None
    cc_rate: str | None
    data_rate_bps: float
    label: str

    @classmethod
    def from_mode(cls, mode: OperatingMode) -> "ModeRecord":
        rs_n, rs_k = mode.rs_params if mode.rs_params else (None, None)
        return cls(
            phy=mode.phy.value,
            index=mode.index,
            modulation=mode.modulation.value,
            rll=mode.line_code.value,
            clock_hz=float(mode.optical_clock_hz),
            rs_n=rs_n,
            rs_k=rs_k,
            cc_rate=f"{mode.cc_rate.numerator}/{mode.cc_rate.denominator}" if mode.cc_rate else None,
            data_rate_bps=float(mode.data_rate),
            label=mode.label,
        )


class DimmingSpec(BaseModel):
    level: int = 50
    ook_method: str = OokDimming.LEVEL_REDEFINITION.value
    compensation_brightness: int = 0
    subframe_chips: int = 256

    def to_config(self) -> DimmingConfig:
        return DimmingConfig(
            level=self.level,
            ook_method=OokDimming(self.ook_method),
            compensation_brightness=self.compensation_brightness,
            subframe_chips=self.subframe_chips,
        )

    @classmethod
    def from_config(cls, dimming: DimmingConfig) -> "DimmingSpec":
        return cls(
            level=dimming.level,
            ook_method=dimming.ook_method.value,
            compensation_brightness=dimming.compensation_brightness,
            subframe_chips=dimming.subframe_chips,
        )


class ChannelSpec(BaseModel):
    gain: float = 1.0
    ambient_dc: float = 0.0
    noise_sigma: float = 0.0
    led_cutoff_hz: float | None = None
    adc_bits: int | None = None
    seed: int = 0
    distance_m: float | None = None
    semi_angle_deg: float | None = None
    off_axis_deg: float = 0.0
    receiver_area_m2: float = 1e-4

    def to_config(self) -> ChannelConfig:
        return ChannelConfig(**self.model_dump())


class WaveformModel(BaseModel):
    samples_b64: str = Field(description="base64 of float32 little-endian samples")
    sample_rate: float
    oversample: int

    @classmethod
    def from_waveform(cls, wave: Waveform) -> "WaveformModel":
        raw = np.asarray(wave.samples, dtype="<f4").tobytes()
        return cls(
            samples_b64=base64.b64encode(raw).decode("ascii"),
            sample_rate=wave.sample_rate,
            oversample=wave.oversample,
        )

    def to_waveform(self) -> Waveform:
        raw = base64.b64decode(self.samples_b64)
        samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        return Waveform(samples, self.sample_rate, self.oversample)


class EncodeRequest(BaseModel):
    phy: str
    mode_index: int
    payload_b64: str = ""
    dimming_level: int = 100
    topology: int = 0
    sequence_number: int = 0


class FrameSections(BaseModel):
    shr_chips: int
    phr_chips: int
    psdu_chips: int
    total_chips: int


class EncodeResponse(BaseModel):
    mode: ModeRecord
    sections: FrameSections
    efficiency: float
    chips_b64: str = Field(description="base64 of one uint8 per chip")
    hex_dump: str


class ModulateRequest(BaseModel):
    phy: str
    mode_index: int
    payload_b64: str = ""
    dimming: DimmingSpec = DimmingSpec(level=50)
    oversample: int | None = None
    topology: int = 0
    sequence_number: int = 0


class ModulateResponse(BaseModel):
    mode: ModeRecord
    waveform: WaveformModel
    sections: FrameSections
    mean_intensity: float
    compensation_chips: int


class DemodulateRequest(BaseModel):
    waveform: WaveformModel
    modulation: str
    phase: int = 0


class DemodulateResponse(BaseModel):
    chips: str = Field(description="hard-decision chips as a '0'/'1' string")


class DecodeRequest(BaseModel):
    waveform: WaveformModel
    phy: str
    dimming: DimmingSpec | None = None
    threshold: float = 0.9


class ReportModel(BaseModel):
    ok: bool
    stage: str | None = None
    error: str | None = None
    frame_start: int | None = None
    topology: int | None = None
    score: float | None = None
    timing_phase: int | None = None
    phy: str | None = None
    mode_index: int | None = None
    psdu_length: int | None = None
    dimming_level: int | None = None
    sequence_number: int | None = None
    phr_corrected: int = 0
    corrected_symbols: int = 0
    payload_b64: str | None = None
    stages: dict[str, bool] = Field(default_factory=dict)


class SimulateRequest(BaseModel):
    phy: str
    mode_index: int
    payload_b64: str = ""
    channel: ChannelSpec = ChannelSpec()
    dimming: DimmingSpec = DimmingSpec(level=50)
    oversample: int | None = None
    seed: int = 0
    threshold: float = 0.45


class SimulateResponse(BaseModel):
    ok: bool
    payload_matches: bool
    stage: str | None
    error: str | None
    chip_errors: int
    chips_compared: int
    corrected_symbols: int
    report: ReportModel


class SweepRequest(BaseModel):
    phy: str
    mode_index: int
    snr_points_db: list[float]
    frames_per_point: int = 100
    payload_octets: int = 64
    dimming: DimmingSpec = DimmingSpec(level=50)
    oversample: int | None = None
    seed: int = 0
    swing: float = 1.0
    detection_threshold: float = 0.45


class SweepPointModel(BaseModel):
    snr_db: float
    noise_sigma: float
    ber: float
    chip_error_rate: float
    fer: float
    ci_lo: float
    ci_hi: float
    frames: int
    chips: int
    corrected_symbols: int


class SweepResponse(BaseModel):
    mode: ModeRecord
    points: list[SweepPointModel]
    csv_rows: list[str]


class SendFileRequest(BaseModel):
    phy: str
    mode_index: int
    data_b64: str
    channel: ChannelSpec = ChannelSpec()
    dimming: DimmingSpec = DimmingSpec(level=50)
    oversample: int | None = None
    seed: int = 0
    chunk_octets: int = 1024
    threshold: float = 0.45


class TransferModel(BaseModel):
    ok: bool
    frames_sent: int
    frames_recovered: int
    octets: int
    digest_sent: str
    digest_received: str | None


class FecDescription(BaseModel):
    cc_constraint_length: int
    cc_generators_octal: list[str]
    cc_tail_bits: int
    cc_rate_patterns: dict[str, dict]
    rs_codes: list[dict]
    gf16_primitive_poly: str
    gf256_primitive_poly: str
    crc_poly: str
    crc_init: str


class HealthResponse(BaseModel):
    status: str
    version: str
