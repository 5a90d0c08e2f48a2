"""FastAPI service exposing the PHY baseband over HTTP.

Core-domain errors map to HTTP statuses (unknown mode -> 404, bad
configuration -> 400). A frame that fails to decode is a *result*, not a
server error: decode/simulate respond 200 with ``ok=false`` plus the stage
that failed, mirroring the staged receiver reports.
"""

from __future__ import annotations

import base64

import numpy as np
from fastapi import FastAPI, HTTPException, Query

from .. import __version__
from ..errors import ConfigError, FramingError, ModeNotFoundError, ReceiveError, VlcPhyError
from ..fec.convolutional import CONSTRAINT_LENGTH, GENERATORS_OCTAL, RATE_PATTERNS, TAIL_BITS
from ..framing import CRC_INIT, CRC_POLY, Mhr, assemble_frame, frame_overhead, hex_dump
from ..harness import SweepSpec, ber_sweep, run_loopback, send_file
from ..modem import modulate_frame, ook_demodulate, vppm_demodulate
from ..modes import Modulation, Phy, list_modes, lookup_mode
from ..receiver import RxReport, receive_frame
from .schemas import (
    DecodeRequest,
    DemodulateRequest,
    DemodulateResponse,
    EncodeRequest,
    EncodeResponse,
    FecDescription,
    FrameSections,
    HealthResponse,
    ModeRecord,
    ModulateRequest,
    ModulateResponse,
    ReportModel,
    SendFileRequest,
    SimulateRequest,
    SimulateResponse,
    SweepPointModel,
    SweepRequest,
    SweepResponse,
    TransferModel,
    WaveformModel,
)

app = FastAPI(
    title="vlcphy",
    version=__version__,
    description="Visible-light-communication PHY baseband: encode, modulate, decode, simulate.",
)


def _mode_or_404(phy: str, index: int):
    try:
        return lookup_mode(Phy.parse(phy), index)
    except (ModeNotFoundError, ValueError) as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc


def _payload_or_400(payload_b64: str) -> bytes:
    try:
        return base64.b64decode(payload_b64, validate=True)
    except Exception as exc:
        raise HTTPException(status_code=400, detail=f"invalid base64 payload: {exc}") from exc


def _report_model(report: RxReport | None, ok: bool, stage: str | None, error: str | None) -> ReportModel:
    model = ReportModel(ok=ok, stage=stage, error=error)
    if report is None:
        return model
    if report.sync is not None:
        model.frame_start = report.sync.frame_start
        model.topology = report.sync.topology
        model.score = report.sync.score
    model.timing_phase = report.timing_phase
    if report.phr is not None:
        model.phy = report.phr.phy.value
        model.mode_index = report.phr.mode_index
        model.psdu_length = report.phr.psdu_length
        model.dimming_level = report.phr.dimming_level
    if report.mhr is not None:
        model.sequence_number = report.mhr.sequence_number
    model.phr_corrected = report.phr_corrected
    if report.fec is not None:
        model.corrected_symbols = report.fec.corrected_symbols
    if report.payload is not None:
        model.payload_b64 = base64.b64encode(report.payload).decode("ascii")
    model.stages = dict(report.stages)
    return model


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/modes", response_model=list[ModeRecord])
def modes(phy: str | None = Query(default=None)) -> list[ModeRecord]:
    try:
        selected = list_modes(Phy.parse(phy) if phy else None)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return [ModeRecord.from_mode(m) for m in selected]


@app.get("/modes/{phy}/{index}", response_model=ModeRecord)
def mode_detail(phy: str, index: int) -> ModeRecord:
    return ModeRecord.from_mode(_mode_or_404(phy, index))


@app.get("/fec", response_model=FecDescription)
def fec_description() -> FecDescription:
    patterns = {}
    for rate, (pat_in, pat_out, per_bit) in RATE_PATTERNS.items():
        patterns[f"{rate.numerator}/{rate.denominator}"] = {
            "input_bits": pat_in,
            "output_bits": pat_out,
            "mother_bit_repeats": list(per_bit),
        }
    rs_codes = sorted(
        {m.rs_params for m in list_modes() if m.rs_params},
        key=lambda nk: (nk[0], nk[1]),
    )
    return FecDescription(
        cc_constraint_length=CONSTRAINT_LENGTH,
        cc_generators_octal=[f"{g:o}" for g in GENERATORS_OCTAL],
        cc_tail_bits=TAIL_BITS,
        cc_rate_patterns=patterns,
        rs_codes=[
            {"n": n, "k": k, "field": "GF(16)" if n <= 15 else "GF(256)"} for n, k in rs_codes
        ],
        gf16_primitive_poly="0x13",
        gf256_primitive_poly="0x11D",
        crc_poly=f"0x{CRC_POLY:04X}",
        crc_init=f"0x{CRC_INIT:04X}",
    )


@app.post("/frames/encode", response_model=EncodeResponse)
def encode(req: EncodeRequest) -> EncodeResponse:
    mode = _mode_or_404(req.phy, req.mode_index)
    payload = _payload_or_400(req.payload_b64)
    try:
        frame = assemble_frame(
            payload,
            mode,
            dimming_level=req.dimming_level,
            mhr=Mhr(sequence_number=req.sequence_number),
            topology=req.topology,
        )
    except (ConfigError, FramingError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    _, efficiency = frame_overhead(mode, len(payload))
    chips = frame.chips.astype(np.uint8).tobytes()
    return EncodeResponse(
        mode=ModeRecord.from_mode(mode),
        sections=FrameSections(
            shr_chips=frame.shr_chips.size,
            phr_chips=frame.phr_chips.size,
            psdu_chips=frame.psdu_chips.size,
            total_chips=frame.total_chips,
        ),
        efficiency=efficiency,
        chips_b64=base64.b64encode(chips).decode("ascii"),
        hex_dump=hex_dump(frame),
    )


@app.post("/frames/modulate", response_model=ModulateResponse)
def modulate(req: ModulateRequest) -> ModulateResponse:
    mode = _mode_or_404(req.phy, req.mode_index)
    payload = _payload_or_400(req.payload_b64)
    try:
        dimming = req.dimming.to_config()
        frame = assemble_frame(
            payload,
            mode,
            dimming_level=dimming.level,
            mhr=Mhr(sequence_number=req.sequence_number),
            topology=req.topology,
        )
        tx = modulate_frame(frame, dimming, req.oversample)
    except (ConfigError, FramingError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    comp = tx.compensation.total_compensation if tx.compensation else 0
    return ModulateResponse(
        mode=ModeRecord.from_mode(mode),
        waveform=WaveformModel.from_waveform(tx.waveform),
        sections=FrameSections(
            shr_chips=frame.shr_chips.size,
            phr_chips=frame.phr_chips.size,
            psdu_chips=frame.psdu_chips.size,
            total_chips=frame.total_chips,
        ),
        mean_intensity=float(tx.waveform.samples.mean()),
        compensation_chips=comp,
    )


@app.post("/frames/demodulate", response_model=DemodulateResponse)
def demodulate(req: DemodulateRequest) -> DemodulateResponse:
    wave = req.waveform.to_waveform()
    try:
        modulation = Modulation(req.modulation.upper())
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"unknown modulation {req.modulation!r}") from exc
    try:
        if modulation is Modulation.OOK:
            chips = ook_demodulate(wave, phase=req.phase)
        else:
            chips = vppm_demodulate(wave, phase=req.phase)
    except (ConfigError, FramingError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return DemodulateResponse(chips="".join("1" if c else "0" for c in chips))


@app.post("/frames/decode", response_model=ReportModel)
def decode(req: DecodeRequest) -> ReportModel:
    wave = req.waveform.to_waveform()
    try:
        phy = Phy.parse(req.phy)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    dimming = req.dimming.to_config() if req.dimming else None
    try:
        report = receive_frame(wave, phy, dimming, threshold=req.threshold)
    except ReceiveError as exc:
        return _report_model(exc.report, ok=False, stage=exc.stage, error=str(exc))
    except VlcPhyError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _report_model(report, ok=True, stage=None, error=None)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    mode = _mode_or_404(req.phy, req.mode_index)
    payload = _payload_or_400(req.payload_b64)
    try:
        result = run_loopback(
            mode,
            payload,
            req.channel.to_config(),
            req.dimming.to_config(),
            req.oversample,
            seed=req.seed,
            threshold=req.threshold,
        )
    except (ConfigError, FramingError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return SimulateResponse(
        ok=result.ok,
        payload_matches=result.payload_matches,
        stage=result.stage,
        error=result.error,
        chip_errors=result.chip_errors,
        chips_compared=result.chips_compared,
        corrected_symbols=result.corrected_symbols,
        report=_report_model(result.report, result.ok, result.stage, result.error),
    )


@app.post("/sendfile", response_model=TransferModel)
def sendfile(req: SendFileRequest) -> TransferModel:
    mode = _mode_or_404(req.phy, req.mode_index)
    data = _payload_or_400(req.data_b64)
    try:
        result = send_file(
            data,
            mode,
            req.channel.to_config(),
            req.dimming.to_config(),
            req.oversample,
            seed=req.seed,
            chunk_octets=req.chunk_octets,
            threshold=req.threshold,
        )
    except (ConfigError, FramingError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return TransferModel(
        ok=result.ok,
        frames_sent=result.frames_sent,
        frames_recovered=result.frames_recovered,
        octets=result.octets,
        digest_sent=result.digest_sent,
        digest_received=result.digest_received,
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    mode = _mode_or_404(req.phy, req.mode_index)
    try:
        spec = SweepSpec(
            mode=mode,
            snr_points_db=tuple(req.snr_points_db),
            frames_per_point=req.frames_per_point,
            payload_octets=req.payload_octets,
            dimming=req.dimming.to_config(),
            oversample=req.oversample,
            seed=req.seed,
            swing=req.swing,
            detection_threshold=req.detection_threshold,
        )
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    result = ber_sweep(spec)
    points = []
    for p in result.points:
        lo, hi = p.fer_interval
        points.append(
            SweepPointModel(
                snr_db=p.snr_db,
                noise_sigma=p.noise_sigma,
                ber=p.ber,
                chip_error_rate=p.chip_error_rate,
                fer=p.fer,
                ci_lo=lo,
                ci_hi=hi,
                frames=p.frames,
                chips=p.chips,
                corrected_symbols=p.corrected_symbols,
            )
        )
    return SweepResponse(mode=ModeRecord.from_mode(mode), points=points, csv_rows=result.csv_rows())
