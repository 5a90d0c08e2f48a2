"""Waveform file I/O: raw float32 little-endian samples plus a JSON sidecar.

The sample file holds nothing but the intensity samples; everything needed
to interpret them (sample rate, oversampling factor, operating mode and
dimming setup) travels in ``<path>.json`` alongside.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .modem import DimmingConfig, OokDimming, Waveform
from .modes import OperatingMode, Phy, lookup_mode

SIDECAR_SUFFIX = ".json"


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + SIDECAR_SUFFIX)


def dimming_to_dict(dimming: DimmingConfig) -> dict:
    return {
        "level": dimming.level,
        "ook_method": dimming.ook_method.value,
        "compensation_brightness": dimming.compensation_brightness,
        "subframe_chips": dimming.subframe_chips,
    }


def dimming_from_dict(data: dict | None) -> DimmingConfig:
    if not data:
        return DimmingConfig()
    return DimmingConfig(
        level=int(data.get("level", 50)),
        ook_method=OokDimming(data.get("ook_method", OokDimming.LEVEL_REDEFINITION.value)),
        compensation_brightness=int(data.get("compensation_brightness", 0)),
        subframe_chips=int(data.get("subframe_chips", DimmingConfig().subframe_chips)),
    )


def write_waveform(
    path: str | Path,
    wave: Waveform,
    mode: OperatingMode | None = None,
    dimming: DimmingConfig | None = None,
) -> Path:
    """Write samples as float32-LE and the metadata sidecar; returns the sidecar path."""
    path = Path(path)
    samples = np.asarray(wave.samples, dtype="<f4")
    path.write_bytes(samples.tobytes())
    meta = {
        "sample_rate": wave.sample_rate,
        "oversample": wave.oversample,
        "phy": mode.phy.value if mode else None,
        "mode_index": mode.index if mode else None,
        "dimming": dimming_to_dict(dimming) if dimming else None,
    }
    side = sidecar_path(path)
    side.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return side


def read_waveform(path: str | Path) -> tuple[Waveform, OperatingMode | None, DimmingConfig | None]:
    """Read samples and sidecar; mode/dimming are None when the sidecar omits them."""
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        msg = f"missing sidecar file {side}"
        raise ConfigError(msg)
    meta = json.loads(side.read_text(encoding="utf-8"))
    if "sample_rate" not in meta or "oversample" not in meta:
        msg = "sidecar must carry sample_rate and oversample"
        raise ConfigError(msg)
    samples = np.frombuffer(path.read_bytes(), dtype="<f4").astype(np.float64)
    wave = Waveform(samples, float(meta["sample_rate"]), int(meta["oversample"]))
    mode = None
    if meta.get("phy") is not None and meta.get("mode_index") is not None:
        mode = lookup_mode(Phy.parse(meta["phy"]), int(meta["mode_index"]))
    dimming = dimming_from_dict(meta.get("dimming")) if meta.get("dimming") else None
    return wave, mode, dimming


__all__ = [
    "SIDECAR_SUFFIX",
    "dimming_from_dict",
    "dimming_to_dict",
    "read_waveform",
    "sidecar_path",
    "write_waveform",
]
