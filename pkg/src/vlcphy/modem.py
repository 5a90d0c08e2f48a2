"""Chip-to-sample modulation: OOK and VPPM with dimming support.

Intensity samples are normalized to [0, 1]. OOK dims either by redefining
the on/off levels around the target mean or by inserting runs of constant
compensation symbols between sub-frames of the payload stream; VPPM dims by
pulse width, so its mean equals the duty cycle exactly regardless of data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field

import numpy as np

from .bitops import as_bits
from .errors import ConfigError, FramingError
from .framing import Frame
from .modes import Modulation, OperatingMode

DEFAULT_SUBFRAME_CHIPS = 256


class OokDimming(enum.Enum):
    """How OOK reaches a non-50% average intensity."""

    LEVEL_REDEFINITION = "level-redefinition"
    COMPENSATION = "compensation"


class IdleKind(enum.Enum):
    IN_BAND = "in-band"
    OUT_OF_BAND = "out-of-band"


@dataclass(frozen=True)
class DimmingConfig:
    """Target brightness and the mechanism used to reach it.

    `level` is the target average intensity in percent. For VPPM it is the
    pulse duty cycle (grid of 10..90%); for OOK either the on/off levels are
    recentred or constant symbols of `compensation_brightness` are inserted
    after every `subframe_chips` payload chips.
    """

    level: int = 50
    ook_method: OokDimming = OokDimming.LEVEL_REDEFINITION
    compensation_brightness: int = 0
    subframe_chips: int = DEFAULT_SUBFRAME_CHIPS

    def __post_init__(self):
        if not 0 <= self.level <= 100:
            msg = f"dimming level {self.level} outside 0..100"
            raise ConfigError(msg)
        if self.compensation_brightness not in (0, 1):
            msg = "compensation symbols are constant 0 or 1"
            raise ConfigError(msg)
        if self.subframe_chips < 1:
            msg = "sub-frame length must be positive"
            raise ConfigError(msg)

    @property
    def target(self) -> float:
        return self.level / 100.0


NO_DIMMING = DimmingConfig(level=50)


@dataclass(frozen=True)
class Waveform:
    """Sampled intensity waveform plus its clocking metadata."""

    samples: np.ndarray
    sample_rate: float
    oversample: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.oversample < 2:
            msg = f"oversample must be >= 2, got {self.oversample}"
            raise ConfigError(msg)

    @property
    def chip_rate(self) -> float:
        return self.sample_rate / self.oversample

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


def default_oversample(mode: OperatingMode) -> int:
    """8 for OOK; 10 for VPPM so every 10%-grid pulse width is integral."""
    return 8 if mode.modulation is Modulation.OOK else 10


def ook_levels(dimming: DimmingConfig) -> tuple[float, float]:
    """(off, on) levels after level redefinition; plain 0/1 otherwise."""
    if dimming.ook_method is not OokDimming.LEVEL_REDEFINITION:
        return 0.0, 1.0
    target = dimming.target
    if target <= 0.5:
        return 0.0, 2.0 * target
    return 2.0 * target - 1.0, 1.0


def ook_modulate(
    chips,
    oversample: int,
    chip_rate_hz: float,
    dimming: DimmingConfig = NO_DIMMING,
) -> Waveform:
    """Map chips to rectangular on/off pulses of `oversample` samples."""
    if oversample < 2:
        msg = f"oversample must be >= 2, got {oversample}"
        raise ConfigError(msg)
    chips = as_bits(chips)
    off, on = ook_levels(dimming)
    levels = np.array([off, on])
    samples = np.repeat(levels[chips], oversample)
    return Waveform(samples, chip_rate_hz * oversample, oversample)


def ook_demodulate(wave: Waveform, phase: int = 0, threshold: float | None = None) -> np.ndarray:
    """Chip decisions by comparing each chip's sample mean to a threshold.

    With no explicit threshold the stream mean is used, which matches the
    midpoint of the two levels on any DC-balanced chip stream.
    """
    n = wave.oversample
    samples = wave.samples[phase:]
    if samples.size < n:
        msg = "waveform shorter than one chip"
        raise FramingError(msg)
    n_chips = samples.size // n
    means = samples[: n_chips * n].reshape(n_chips, n).mean(axis=1)
    if threshold is None:
        threshold = float(samples.mean())
    return (means > threshold).astype(np.uint8)


def vppm_pulse_width(dimming: DimmingConfig, oversample: int) -> int:
    """Pulse width in samples; requires duty * oversample to be integral."""
    width = dimming.target * oversample
    if abs(width - round(width)) > 1e-9:
        msg = (
            f"VPPM duty {dimming.level}% needs an integral pulse width; "
            f"oversample {oversample} gives {width:.2f} samples"
        )
        raise ConfigError(msg)
    width = int(round(width))
    if not 0 < width < oversample:
        msg = f"VPPM duty {dimming.level}% must keep the pulse inside the slot"
        raise ConfigError(msg)
    return width


def vppm_modulate(
    bits,
    oversample: int,
    chip_rate_hz: float,
    dimming: DimmingConfig = NO_DIMMING,
) -> Waveform:
    """Pulse-position modulation: 0 pulses at slot start, 1 at slot end."""
    if oversample < 2 or oversample % 2:
        msg = f"VPPM needs an even oversample >= 2, got {oversample}"
        raise ConfigError(msg)
    bits = as_bits(bits)
    width = vppm_pulse_width(dimming, oversample)
    slot0 = np.zeros(oversample)
    slot0[:width] = 1.0
    slot1 = np.zeros(oversample)
    slot1[oversample - width :] = 1.0
    table = np.stack([slot0, slot1])
    samples = table[bits].ravel()
    return Waveform(samples, chip_rate_hz * oversample, oversample)


def vppm_demodulate(wave: Waveform, phase: int = 0) -> np.ndarray:
    """Half-slot energy comparison; ties resolve to 0."""
    n = wave.oversample
    if n % 2:
        msg = "VPPM demodulation needs an even oversample"
        raise ConfigError(msg)
    samples = wave.samples[phase:]
    if samples.size < n:
        msg = "waveform shorter than one slot"
        raise FramingError(msg)
    n_bits = samples.size // n
    slots = samples[: n_bits * n].reshape(n_bits, n)
    first = slots[:, : n // 2].sum(axis=1)
    second = slots[:, n // 2 :].sum(axis=1)
    return (second > first).astype(np.uint8)


# ---------------------------------------------------------------------------
# compensation symbols

@dataclass(frozen=True)
class CompensationMap:
    """Placement of constant compensation runs inside a payload stream.

    Runs are inserted after every sub-frame of `subframe_chips` data chips
    (the data tail keeps its run too); run lengths differ by at most one
    chip and longer runs come first, fully determined by the data length
    and the dimming configuration.
    """

    data_chips: int
    subframe_chips: int
    brightness: int
    runs: tuple[int, ...]

    @property
    def total_compensation(self) -> int:
        return sum(self.runs)

    @property
    def fraction(self) -> float:
        total = self.data_chips + self.total_compensation
        return self.total_compensation / total if total else 0.0


def compensation_plan(data_chips: int, dimming: DimmingConfig) -> CompensationMap:
    """Compute run placement for a balanced data stream of given length.

    The fraction f solves 0.5*(1-f) + brightness*f = target; targets on the
    wrong side of 50% for the configured brightness raise ConfigError.
    """
    target = dimming.target
    beta = float(dimming.compensation_brightness)
    denom = 0.5 - beta
    if denom == 0:
        msg = "compensation brightness 0.5 is not a constant symbol"
        raise ConfigError(msg)
    fraction = (0.5 - target) / denom
    if fraction < 0 or fraction >= 1:
        msg = (
            f"target {dimming.level}% is unreachable with brightness-"
            f"{dimming.compensation_brightness} compensation symbols"
        )
        raise ConfigError(msg)
    total = int(round(data_chips * fraction / (1.0 - fraction)))
    n_subframes = max(1, -(-data_chips // dimming.subframe_chips))
    base, extra = divmod(total, n_subframes)
    runs = tuple(base + 1 if i < extra else base for i in range(n_subframes))
    return CompensationMap(
        data_chips=data_chips,
        subframe_chips=dimming.subframe_chips,
        brightness=dimming.compensation_brightness,
        runs=runs,
    )


def insert_compensation(chips, dimming: DimmingConfig) -> tuple[np.ndarray, CompensationMap]:
    """Interleave compensation runs into a chip stream per the fixed plan."""
    chips = as_bits(chips)
    plan = compensation_plan(chips.size, dimming)
    pieces = []
    for i, run in enumerate(plan.runs):
        start = i * plan.subframe_chips
        pieces.append(chips[start : start + plan.subframe_chips])
        pieces.append(np.full(run, plan.brightness, dtype=np.uint8))
    return np.concatenate(pieces) if pieces else chips.copy(), plan


def strip_compensation(chips, plan: CompensationMap) -> np.ndarray:
    """Remove the compensation runs described by a plan."""
    chips = as_bits(chips)
    expected = plan.data_chips + plan.total_compensation
    if chips.size != expected:
        msg = f"stream of {chips.size} chips does not match plan length {expected}"
        raise FramingError(msg)
    pieces = []
    pos = 0
    remaining = plan.data_chips
    for run in plan.runs:
        take = min(plan.subframe_chips, remaining)
        pieces.append(chips[pos : pos + take])
        pos += take + run
        remaining -= take
    return np.concatenate(pieces) if pieces else chips.copy()


# ---------------------------------------------------------------------------
# idle patterns

def generate_idle(
    mode: OperatingMode,
    dimming: DimmingConfig,
    kind: IdleKind,
    duration_chips: int,
    oversample: int | None = None,
) -> Waveform:
    """Inter-frame fill: structured (in-band) or constant (out-of-band)."""
    if duration_chips < 0:
        msg = "idle duration cannot be negative"
        raise ConfigError(msg)
    oversample = oversample or default_oversample(mode)
    if kind is IdleKind.OUT_OF_BAND:
        samples = np.full(duration_chips * oversample, dimming.target)
        return Waveform(samples, mode.optical_clock_hz * oversample, oversample)
    # in-band: balanced alternation built from valid channel symbols, so the
    # mean equals the target and runs stay within one chip
    pattern = np.tile(np.array([0, 1], dtype=np.uint8), -(-duration_chips // 2))[:duration_chips]
    if mode.modulation is Modulation.OOK:
        return ook_modulate(pattern, oversample, mode.optical_clock_hz, dimming)
    return vppm_modulate(pattern, oversample, mode.optical_clock_hz, dimming)


# ---------------------------------------------------------------------------
# whole-frame modulation

@dataclass(frozen=True)
class TxFrame:
    """A modulated frame: samples plus the receiver-relevant geometry."""

    waveform: Waveform
    frame: Frame
    dimming: DimmingConfig
    compensation: CompensationMap | None
    section_samples: tuple[int, int, int]


def modulate_frame(
    frame: Frame,
    dimming: DimmingConfig = NO_DIMMING,
    oversample: int | None = None,
) -> TxFrame:
    """Modulate an assembled frame section by section.

    The SHR is always plain OOK chips (under the OOK levels in force) so the
    detector's template never depends on the payload mode's pulse width; the
    PHR uses the base-mode modulation; the PSDU uses the mode's modulation
    with compensation runs inserted when configured.
    """
    mode = frame.mode
    oversample = oversample or default_oversample(mode)
    clock = mode.optical_clock_hz
    is_ook = mode.modulation is Modulation.OOK
    ook_dim = dimming if is_ook else NO_DIMMING

    shr_wave = ook_modulate(frame.shr_chips, oversample, clock, ook_dim)

    from .framing import phr_modulation

    if phr_modulation(mode) is Modulation.OOK:
        phr_wave = ook_modulate(frame.phr_chips, oversample, clock, ook_dim)
    else:
        phr_wave = vppm_modulate(frame.phr_chips, oversample, clock, dimming)

    psdu_chips = frame.psdu_chips
    compensation = None
    if is_ook and dimming.ook_method is OokDimming.COMPENSATION and dimming.level != 50:
        psdu_chips, compensation = insert_compensation(psdu_chips, dimming)
    if is_ook:
        psdu_wave = ook_modulate(psdu_chips, oversample, clock, ook_dim)
    else:
        psdu_wave = vppm_modulate(psdu_chips, oversample, clock, dimming)

    samples = np.concatenate([shr_wave.samples, phr_wave.samples, psdu_wave.samples])
    sections = (
        shr_wave.samples.size,
        shr_wave.samples.size + phr_wave.samples.size,
        samples.size,
    )
    return TxFrame(
        waveform=Waveform(samples, clock * oversample, oversample),
        frame=frame,
        dimming=dimming,
        compensation=compensation,
        section_samples=sections,
    )
