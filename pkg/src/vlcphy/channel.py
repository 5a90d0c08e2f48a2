"""Optical wireless channel: Lambertian geometry, LED bandwidth, AWGN, ADC.

The sample path is y = quantize(gain * lowpass(x) + ambient_dc + noise),
deterministic for a given seed. Geometry enters only through a single
scalar gain (and the photometric link budget helpers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import signal

from .errors import ConfigError
from .modem import Waveform


def lambertian_order(semi_angle_deg: float) -> float:
    """Lambertian mode number m from the half-intensity semi-angle."""
    if not 0.0 < semi_angle_deg < 90.0:
        msg = f"semi-angle must lie in (0, 90) degrees, got {semi_angle_deg}"
        raise ConfigError(msg)
    return -math.log(2.0) / math.log(math.cos(math.radians(semi_angle_deg)))


def illuminance_at(
    intensity_cd: float,
    distance_m: float,
    off_axis_deg: float = 0.0,
    order: float = 1.0,
) -> float:
    """Photometric illuminance I * cos^m(theta) / d^2 in lux."""
    if distance_m <= 0:
        msg = "distance must be positive"
        raise ConfigError(msg)
    theta = math.radians(off_axis_deg)
    if not -90.0 < off_axis_deg < 90.0:
        return 0.0
    return intensity_cd * math.cos(theta) ** order / distance_m**2


def lambertian_gain(
    distance_m: float,
    semi_angle_deg: float,
    off_axis_deg: float = 0.0,
    receiver_area_m2: float = 1e-4,
) -> float:
    """Line-of-sight channel gain (m+1) A cos^m(theta) / (2 pi d^2)."""
    m = lambertian_order(semi_angle_deg)
    theta = math.radians(off_axis_deg)
    if distance_m <= 0:
        msg = "distance must be positive"
        raise ConfigError(msg)
    return (m + 1.0) * receiver_area_m2 * math.cos(theta) ** m / (2.0 * math.pi * distance_m**2)


@dataclass(frozen=True)
class LinkBudget:
    """Photometric/electrical summary of a line-of-sight link."""

    luminous_intensity_cd: float
    illuminance_lux: float
    electrical_gain: float


def link_budget(
    intensity_cd: float,
    distance_m: float,
    semi_angle_deg: float,
    off_axis_deg: float = 0.0,
    receiver_area_m2: float = 1e-4,
) -> LinkBudget:
    m = lambertian_order(semi_angle_deg)
    return LinkBudget(
        luminous_intensity_cd=intensity_cd,
        illuminance_lux=illuminance_at(intensity_cd, distance_m, off_axis_deg, m),
        electrical_gain=lambertian_gain(distance_m, semi_angle_deg, off_axis_deg, receiver_area_m2),
    )


@dataclass(frozen=True)
class ChannelConfig:
    """Impairment settings for apply_channel.

    `gain` is used directly unless geometry fields are given, in which case
    the Lambertian line-of-sight gain replaces it. `led_cutoff_hz` of None
    or inf disables the one-pole low-pass.
    """

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

    def __post_init__(self):
        if self.noise_sigma < 0:
            msg = "noise sigma cannot be negative"
            raise ConfigError(msg)
        if self.adc_bits is not None and not 1 <= self.adc_bits <= 24:
            msg = "adc_bits must lie in 1..24"
            raise ConfigError(msg)

    @property
    def effective_gain(self) -> float:
        if self.distance_m is not None and self.semi_angle_deg is not None:
            return lambertian_gain(
                self.distance_m, self.semi_angle_deg, self.off_axis_deg, self.receiver_area_m2
            )
        return self.gain

    def with_seed(self, seed: int) -> "ChannelConfig":
        return replace(self, seed=seed)


IDENTITY_CHANNEL = ChannelConfig()


def lowpass_pole(cutoff_hz: float, sample_rate: float) -> float:
    """Discrete pole of the one-pole LED model at a given sample rate."""
    return math.exp(-2.0 * math.pi * cutoff_hz / sample_rate)


def apply_channel(wave: Waveform, config: ChannelConfig = IDENTITY_CHANNEL) -> Waveform:
    """Run a waveform through the configured impairments."""
    x = wave.samples
    if config.led_cutoff_hz is not None and math.isfinite(config.led_cutoff_hz):
        if config.led_cutoff_hz <= 0:
            msg = "LED cutoff must be positive"
            raise ConfigError(msg)
        a = lowpass_pole(config.led_cutoff_hz, wave.sample_rate)
        x = signal.lfilter([1.0 - a], [1.0, -a], x)
    y = config.effective_gain * x + config.ambient_dc
    if config.noise_sigma > 0:
        rng = np.random.default_rng(config.seed)
        y = y + rng.normal(0.0, config.noise_sigma, y.shape)
    if config.adc_bits is not None:
        levels = (1 << config.adc_bits) - 1
        y = np.round(np.clip(y, 0.0, 1.0) * levels) / levels
    return Waveform(y, wave.sample_rate, wave.oversample)


def snr_for(config: ChannelConfig, swing: float = 1.0) -> float:
    """Electrical SNR in dB: (gain * swing)^2 / sigma^2."""
    if config.noise_sigma == 0:
        return math.inf
    return 20.0 * math.log10(config.effective_gain * swing / config.noise_sigma)


def sigma_for_snr(snr_db: float, gain: float = 1.0, swing: float = 1.0) -> float:
    """Noise sigma that realizes a target electrical SNR."""
    return gain * swing / (10.0 ** (snr_db / 20.0))
