"""Operating-mode registry.

Each mode fixes a modulation, a line code, an optical clock and the error
correction pair (Reed-Solomon, convolutional) of one low- or moderate-rate
VLC operating point. Data rates follow exactly from

    rate = optical_clock * r_line * r_rs * r_cc

with r_line in {1/2, 2/3, 4/5} for Manchester, 4B6B and 8B10B.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, ModeNotFoundError


class Phy(enum.Enum):
    """PHY type: low-rate outdoor (I) or moderate-rate indoor (II)."""

    PHY1 = "PHY-I"
    PHY2 = "PHY-II"

    @classmethod
    def parse(cls, text) -> "Phy":
        if isinstance(text, Phy):
            return text
        key = str(text).strip().upper().removeprefix("PHY").strip("-_ ")
        if key in ("I", "1"):
            return cls.PHY1
        if key in ("II", "2"):
            return cls.PHY2
        msg = f"unknown PHY type {text!r} (expected I or II)"
        raise ConfigError(msg)


class Modulation(enum.Enum):
    OOK = "OOK"
    VPPM = "VPPM"


class LineCode(enum.Enum):
    MANCHESTER = "Manchester"
    FOUR_SIX = "4B6B"
    EIGHT_TEN = "8B10B"

    @property
    def ratio(self) -> Fraction:
        """Data bits carried per emitted chip."""
        return _LINE_RATIO[self]


_LINE_RATIO = {
    LineCode.MANCHESTER: Fraction(1, 2),
    LineCode.FOUR_SIX: Fraction(2, 3),
    LineCode.EIGHT_TEN: Fraction(4, 5),
}


@dataclass(frozen=True)
class OperatingMode:
    """One row of the operating-mode table."""

    phy: Phy
    index: int
    modulation: Modulation
    line_code: LineCode
    optical_clock_hz: int
    rs_params: tuple[int, int] | None = None
    cc_rate: Fraction | None = None

    def __post_init__(self):
        if self.optical_clock_hz <= 0:
            msg = "optical clock must be positive"
            raise ConfigError(msg)
        if self.rs_params is not None:
            n, k = self.rs_params
            if not 1 <= k < n:
                msg = f"RS parameters must satisfy 1 <= k < n, got ({n}, {k})"
                raise ConfigError(msg)
        if self.cc_rate is not None:
            if self.phy is not Phy.PHY1 or self.rs_params is None:
                msg = "convolutional coding only combines with RS on PHY-I modes"
                raise ConfigError(msg)

    @property
    def rs_ratio(self) -> Fraction:
        if self.rs_params is None:
            return Fraction(1)
        n, k = self.rs_params
        return Fraction(k, n)

    @property
    def cc_ratio(self) -> Fraction:
        return Fraction(1) if self.cc_rate is None else self.cc_rate

    @property
    def data_rate(self) -> Fraction:
        """Net payload bit rate in bit/s, exact."""
        return (
            Fraction(self.optical_clock_hz)
            * self.line_code.ratio
            * self.rs_ratio
            * self.cc_ratio
        )

    @property
    def chip_rate_hz(self) -> int:
        """Channel symbol (chip) rate; equals the optical clock."""
        return self.optical_clock_hz

    @property
    def label(self) -> str:
        fec = "uncoded" if self.rs_params is None else f"RS({self.rs_params[0]},{self.rs_params[1]})"
        if self.cc_rate is not None:
            fec += f"+CC{self.cc_rate}"
        return (
            f"{self.phy.value} mode {self.index}: {self.modulation.value}/"
            f"{self.line_code.value} @ {format_si(self.optical_clock_hz)}Hz, {fec}, "
            f"{format_rate(self.data_rate)}"
        )


def _phy1(index, modulation, line, clock, rs, cc) -> OperatingMode:
    return OperatingMode(Phy.PHY1, index, modulation, line, clock, rs, cc)


def _phy2(index, modulation, line, clock, rs) -> OperatingMode:
    return OperatingMode(Phy.PHY2, index, modulation, line, clock, rs, None)


PHY1_MODES: tuple[OperatingMode, ...] = (
    _phy1(0, Modulation.OOK, LineCode.MANCHESTER, 200_000, (15, 7), Fraction(1, 4)),
    _phy1(1, Modulation.OOK, LineCode.MANCHESTER, 200_000, (15, 11), Fraction(1, 3)),
    _phy1(2, Modulation.OOK, LineCode.MANCHESTER, 200_000, (15, 11), Fraction(2, 3)),
    _phy1(3, Modulation.OOK, LineCode.MANCHESTER, 200_000, (15, 11), None),
    _phy1(4, Modulation.OOK, LineCode.MANCHESTER, 200_000, None, None),
    _phy1(5, Modulation.VPPM, LineCode.FOUR_SIX, 400_000, (15, 2), None),
    _phy1(6, Modulation.VPPM, LineCode.FOUR_SIX, 400_000, (15, 4), None),
    _phy1(7, Modulation.VPPM, LineCode.FOUR_SIX, 400_000, (15, 7), None),
    _phy1(8, Modulation.VPPM, LineCode.FOUR_SIX, 400_000, None, None),
)

PHY2_MODES: tuple[OperatingMode, ...] = (
    _phy2(0, Modulation.VPPM, LineCode.FOUR_SIX, 3_750_000, (64, 32)),
    _phy2(1, Modulation.VPPM, LineCode.FOUR_SIX, 3_750_000, (160, 128)),
    _phy2(2, Modulation.VPPM, LineCode.FOUR_SIX, 7_500_000, (64, 32)),
    _phy2(3, Modulation.VPPM, LineCode.FOUR_SIX, 7_500_000, (160, 128)),
    _phy2(4, Modulation.VPPM, LineCode.FOUR_SIX, 7_500_000, None),
    _phy2(5, Modulation.OOK, LineCode.EIGHT_TEN, 15_000_000, (64, 32)),
    _phy2(6, Modulation.OOK, LineCode.EIGHT_TEN, 15_000_000, (160, 128)),
    _phy2(7, Modulation.OOK, LineCode.EIGHT_TEN, 30_000_000, (64, 32)),
    _phy2(8, Modulation.OOK, LineCode.EIGHT_TEN, 30_000_000, (160, 128)),
    _phy2(9, Modulation.OOK, LineCode.EIGHT_TEN, 60_000_000, (64, 32)),
    _phy2(10, Modulation.OOK, LineCode.EIGHT_TEN, 60_000_000, (160, 128)),
    _phy2(11, Modulation.OOK, LineCode.EIGHT_TEN, 120_000_000, (64, 32)),
    _phy2(12, Modulation.OOK, LineCode.EIGHT_TEN, 120_000_000, (160, 128)),
    _phy2(13, Modulation.OOK, LineCode.EIGHT_TEN, 120_000_000, None),
)


def list_modes(phy: Phy | str | None = None) -> tuple[OperatingMode, ...]:
    """All registered modes, ordered by PHY then index."""
    if phy is None:
        return PHY1_MODES + PHY2_MODES
    phy = Phy.parse(phy)
    return PHY1_MODES if phy is Phy.PHY1 else PHY2_MODES


def lookup_mode(phy: Phy | str, index: int) -> OperatingMode:
    """Fetch one mode by PHY and table index."""
    table = list_modes(phy)
    if not 0 <= index < len(table):
        msg = f"{Phy.parse(phy).value} has no mode index {index}"
        raise ModeNotFoundError(msg)
    return table[index]


def data_rate(mode: OperatingMode) -> Fraction:
    """Net payload bit rate in bit/s, exact."""
    return mode.data_rate


def format_si(value: float) -> str:
    """Compact engineering notation, e.g. 200 k / 3.75 M."""
    value = float(value)
    for factor, suffix in ((1e9, "G"), (1e6, "M"), (1e3, "k")):
        if value >= factor:
            scaled = value / factor
            text = f"{scaled:.4g}"
            return f"{text} {suffix}"
    return f"{value:.4g} "


def format_rate(rate) -> str:
    """Render a bit rate to 4 significant digits with b/s units."""
    return f"{format_si(float(rate))}b/s"


def machine_record(mode: OperatingMode) -> str:
    """One-line machine-readable export of a mode row."""
    n, k = mode.rs_params if mode.rs_params else ("", "")
    cc = str(mode.cc_rate) if mode.cc_rate is not None else ""
    return (
        f"{mode.phy.value},{mode.index},{mode.modulation.value},"
        f"{mode.line_code.value},{mode.optical_clock_hz},{n},{k},{cc},"
        f"{float(mode.data_rate):.6g}"
    )
