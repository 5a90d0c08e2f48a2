"""HTTP service wrapping the PHY core."""

from .app import app

__all__ = ["app"]
