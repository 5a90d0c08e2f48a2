"""Channel model: Lambertian geometry, low-pass, noise, quantization."""

import math

import numpy as np
import pytest

from vlcphy.channel import (
    ChannelConfig,
    IDENTITY_CHANNEL,
    apply_channel,
    illuminance_at,
    lambertian_gain,
    lambertian_order,
    link_budget,
    lowpass_pole,
    sigma_for_snr,
    snr_for,
)
from vlcphy.errors import ConfigError
from vlcphy.modem import Waveform


def _wave(samples, rate=1.6e6, oversample=8):
    return Waveform(np.asarray(samples, dtype=np.float64), rate, oversample)


# ------------------------------------------------------------------ geometry


def test_lambertian_order_sixty_degrees_is_one():
    assert lambertian_order(60.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("angle, order", [(15.0, 20.0), (45.0, 2.0)])
def test_lambertian_order_reference_points(angle, order):
    assert lambertian_order(angle) == pytest.approx(order, rel=2e-3)


def test_lambertian_order_rejects_out_of_range():
    for bad in (0.0, 90.0, -5.0, 120.0):
        with pytest.raises(ConfigError):
            lambertian_order(bad)


def test_illuminance_reference_values():
    # 430 cd on-axis: ~191.1 lux at 1.5 m, ~26.9 lux at 4 m
    assert illuminance_at(430.0, 1.5) == pytest.approx(191.1, abs=0.05)
    assert illuminance_at(430.0, 4.0) == pytest.approx(26.9, abs=0.05)


def test_illuminance_off_axis_and_errors():
    on = illuminance_at(430.0, 2.0, 0.0, order=1.0)
    off = illuminance_at(430.0, 2.0, 60.0, order=1.0)
    assert off == pytest.approx(on * math.cos(math.radians(60.0)))
    assert illuminance_at(430.0, 2.0, 95.0) == 0.0
    with pytest.raises(ConfigError):
        illuminance_at(430.0, 0.0)


def test_lambertian_gain_formula():
    m = lambertian_order(60.0)
    expected = (m + 1) * 1e-4 * math.cos(math.radians(30.0)) ** m / (2 * math.pi * 2.0**2)
    assert lambertian_gain(2.0, 60.0, 30.0) == pytest.approx(expected, rel=1e-12)
    # inverse-square law
    assert lambertian_gain(1.0, 60.0) == pytest.approx(4 * lambertian_gain(2.0, 60.0))


def test_link_budget_bundles_consistent_numbers():
    budget = link_budget(430.0, 1.5, 60.0)
    assert budget.luminous_intensity_cd == 430.0
    assert budget.illuminance_lux == pytest.approx(illuminance_at(430.0, 1.5, 0.0, 1.0))
    assert budget.electrical_gain == pytest.approx(lambertian_gain(1.5, 60.0))


def test_geometry_fields_override_scalar_gain():
    config = ChannelConfig(gain=123.0, distance_m=2.0, semi_angle_deg=60.0)
    assert config.effective_gain == pytest.approx(lambertian_gain(2.0, 60.0))
    assert ChannelConfig(gain=0.5).effective_gain == 0.5


# --------------------------------------------------------------- sample path


def test_identity_channel_is_passthrough():
    x = np.linspace(0.0, 1.0, 64)
    y = apply_channel(_wave(x), IDENTITY_CHANNEL)
    np.testing.assert_array_equal(y.samples, x)
    assert y.sample_rate == 1.6e6
    assert y.oversample == 8


def test_affine_gain_and_dc():
    x = np.array([0.0, 0.5, 1.0])
    y = apply_channel(_wave(x), ChannelConfig(gain=0.5, ambient_dc=0.1))
    np.testing.assert_allclose(y.samples, [0.1, 0.35, 0.6], atol=1e-15)


def test_lowpass_step_response_time_constant():
    # a one-pole filter reaches 1 - 1/e of a step after one time constant
    fs = 1e7
    fc = 1e5
    n_tau = int(round(fs / (2 * math.pi * fc)))
    x = np.ones(10 * n_tau)
    y = apply_channel(_wave(x, fs, 8), ChannelConfig(led_cutoff_hz=fc))
    assert y.samples[n_tau - 1] == pytest.approx(1 - 1 / math.e, rel=2e-2)
    assert y.samples[-1] == pytest.approx(1.0, rel=1e-4)  # settled after 10 tau


def test_lowpass_is_linear_and_preserves_dc():
    rng = np.random.default_rng(60)
    x1 = rng.random(256)
    x2 = rng.random(256)
    config = ChannelConfig(led_cutoff_hz=2e5)
    y1 = apply_channel(_wave(x1), config).samples
    y2 = apply_channel(_wave(x2), config).samples
    y12 = apply_channel(_wave(x1 + x2), config).samples
    np.testing.assert_allclose(y12, y1 + y2, atol=1e-12)
    dc = apply_channel(_wave(np.full(4000, 0.7)), config).samples
    assert dc[-1] == pytest.approx(0.7, rel=1e-9)


def test_lowpass_pole_value():
    assert lowpass_pole(1e5, 1e7) == pytest.approx(math.exp(-2 * math.pi * 0.01))
    with pytest.raises(ConfigError):
        apply_channel(_wave(np.zeros(4)), ChannelConfig(led_cutoff_hz=-1.0))


def test_noise_is_reproducible_and_seed_dependent():
    x = np.zeros(512)
    config = ChannelConfig(noise_sigma=0.1, seed=7)
    a = apply_channel(_wave(x), config).samples
    b = apply_channel(_wave(x), config).samples
    np.testing.assert_array_equal(a, b)
    c = apply_channel(_wave(x), config.with_seed(8)).samples
    assert not np.array_equal(a, c)
    assert np.std(a) == pytest.approx(0.1, rel=0.15)


def test_adc_quantization_grid():
    x = np.linspace(-0.2, 1.2, 1000)
    y = apply_channel(_wave(x), ChannelConfig(adc_bits=4)).samples
    assert y.min() >= 0.0 and y.max() <= 1.0
    levels = np.unique(np.round(y * 15))
    assert len(np.unique(y)) <= 16
    np.testing.assert_allclose(np.round(y * 15), y * 15, atol=1e-9)
    assert levels[0] == 0 and levels[-1] == 15


def test_config_validation():
    with pytest.raises(ConfigError):
        ChannelConfig(noise_sigma=-0.1)
    with pytest.raises(ConfigError):
        ChannelConfig(adc_bits=0)
    with pytest.raises(ConfigError):
        ChannelConfig(adc_bits=25)


# ----------------------------------------------------------------------- SNR


def test_snr_reference_points():
    assert snr_for(ChannelConfig(noise_sigma=0.5)) == pytest.approx(6.0206, abs=1e-3)
    assert snr_for(ChannelConfig(noise_sigma=0.1)) == pytest.approx(20.0, abs=1e-9)
    assert snr_for(ChannelConfig(noise_sigma=0.0)) == math.inf


def test_sigma_for_snr_inverts_snr_for():
    for snr_db in (0.0, 6.0, 13.5, 20.0):
        sigma = sigma_for_snr(snr_db, gain=0.8)
        config = ChannelConfig(gain=0.8, noise_sigma=sigma)
        assert snr_for(config) == pytest.approx(snr_db, abs=1e-9)
    # halving the swing costs 6 dB
    assert sigma_for_snr(10.0, swing=0.5) == pytest.approx(sigma_for_snr(16.0206, swing=1.0), rel=1e-4)
