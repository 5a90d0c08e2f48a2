"""Exception hierarchy shared by the whole package.

Receiver-stage errors carry the stage name and, when available, the partial
receive report assembled up to the failure point.
"""

from __future__ import annotations


class VlcPhyError(Exception):
    """Base class for every error raised by vlcphy."""


class ConfigError(VlcPhyError, ValueError):
    """A parameter is outside its legal range or combination."""


class ModeNotFoundError(VlcPhyError, LookupError):
    """No operating mode exists for the requested PHY/index."""


class FramingError(VlcPhyError):
    """Input length or structure is inconsistent with the expected layout."""


class InvalidSymbolError(VlcPhyError):
    """A line-code group is not a legal codeword.

    `position` is the index of the offending group in the decoded stream.
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class DecodeFailure(VlcPhyError):
    """Error correction failed or detected an uncorrectable word.

    `report` optionally carries per-block diagnostics collected so far.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ReceiveError(VlcPhyError):
    """Base class for staged receiver failures."""

    stage = "receive"

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NoFrameError(ReceiveError):
    """No preamble correlation peak cleared the detection threshold."""

    stage = "detect"


class HeaderCorruptError(ReceiveError):
    """The frame header failed error correction or its CRC check."""

    stage = "phr"


class UnknownModeError(ReceiveError):
    """The header announced a mode index the registry does not contain."""

    stage = "mode"


class PayloadDecodeError(ReceiveError):
    """The payload section could not be recovered."""

    stage = "psdu"
