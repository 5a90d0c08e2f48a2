"""Visible-light-communication PHY baseband: modes, coding, framing, link simulation.

The package models the two low/medium-rate PHY types of a visible-light
communication system end to end: the operating-mode registry with exact
data-rate arithmetic, run-length-limited line codes, Reed-Solomon and
convolutional error correction, frame assembly, intensity modulation with
dimming support, an optical channel simulator, a staged receiver, and a
measurement harness. A FastAPI service (``vlcphy.service``) and a CLI
(``vlcphy`` console script) wrap the core.
"""

from .channel import (
    ChannelConfig,
    IDENTITY_CHANNEL,
    LinkBudget,
    apply_channel,
    illuminance_at,
    lambertian_gain,
    lambertian_order,
    link_budget,
    sigma_for_snr,
    snr_for,
)
from .errors import (
    ConfigError,
    DecodeFailure,
    FramingError,
    HeaderCorruptError,
    InvalidSymbolError,
    ModeNotFoundError,
    NoFrameError,
    PayloadDecodeError,
    ReceiveError,
    UnknownModeError,
    VlcPhyError,
)
from .fec import (
    ConvolutionalCode,
    FecReport,
    RsCode,
    cc_encode,
    fec_decode,
    fec_encode,
    rs_decode,
    rs_encode,
    viterbi_decode,
)
from .framing import Frame, Mhr, Phr, assemble_frame, frame_overhead, hex_dump, unpack_psdu
from .harness import (
    LoopbackResult,
    SweepPoint,
    SweepResult,
    SweepSpec,
    TransferResult,
    analytic_ook_ber,
    ber_sweep,
    run_loopback,
    send_file,
    throughput_check,
    wilson_interval,
)
from .modem import (
    DimmingConfig,
    IdleKind,
    NO_DIMMING,
    OokDimming,
    TxFrame,
    Waveform,
    generate_idle,
    modulate_frame,
)
from .modes import (
    LineCode,
    Modulation,
    OperatingMode,
    Phy,
    data_rate,
    list_modes,
    lookup_mode,
)
from .receiver import RxReport, SyncResult, detect_frame, receive_frame, recover_timing
from .wavefile import read_waveform, write_waveform

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "ConfigError",
    "ConvolutionalCode",
    "DecodeFailure",
    "DimmingConfig",
    "FecReport",
    "Frame",
    "FramingError",
    "HeaderCorruptError",
    "IDENTITY_CHANNEL",
    "IdleKind",
    "InvalidSymbolError",
    "LineCode",
    "LinkBudget",
    "LoopbackResult",
    "Mhr",
    "ModeNotFoundError",
    "Modulation",
    "NO_DIMMING",
    "NoFrameError",
    "OokDimming",
    "OperatingMode",
    "PayloadDecodeError",
    "Phr",
    "Phy",
    "ReceiveError",
    "RsCode",
    "RxReport",
    "SweepPoint",
    "SweepResult",
    "SweepSpec",
    "SyncResult",
    "TransferResult",
    "TxFrame",
    "UnknownModeError",
    "VlcPhyError",
    "Waveform",
    "analytic_ook_ber",
    "apply_channel",
    "assemble_frame",
    "ber_sweep",
    "cc_encode",
    "data_rate",
    "detect_frame",
    "fec_decode",
    "fec_encode",
    "frame_overhead",
    "generate_idle",
    "hex_dump",
    "illuminance_at",
    "lambertian_gain",
    "lambertian_order",
    "link_budget",
    "list_modes",
    "lookup_mode",
    "modulate_frame",
    "read_waveform",
    "receive_frame",
    "recover_timing",
    "rs_decode",
    "rs_encode",
    "run_loopback",
    "send_file",
    "sigma_for_snr",
    "snr_for",
    "throughput_check",
    "unpack_psdu",
    "viterbi_decode",
    "wilson_interval",
    "write_waveform",
]
