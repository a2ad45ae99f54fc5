"""Exception hierarchy shared across the toolkit.

Every error the CLI can surface maps to one of these classes; the exit-code
table lives in :mod:`vqkit.cli`.
"""

from __future__ import annotations


class VqkitError(Exception):
    """Base class for all toolkit errors."""


class StreamParseError(VqkitError):
    """Malformed container header or stream structure.

    Carries the byte offset at which parsing failed when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class TruncatedStreamError(VqkitError):
    """Frame payload ended early; carries the offending frame index."""

    def __init__(self, message: str, frame_index: int):
        super().__init__(f"{message} (frame {frame_index})")
        self.frame_index = frame_index


class UnsupportedFormatError(VqkitError):
    """Pixel format or chroma subsampling the toolkit does not handle."""


class GeometryError(VqkitError):
    """File size or plane dimensions inconsistent with the declared geometry."""


class TooShortError(VqkitError):
    """Video has too few frames or too little duration to schedule chunks."""


class ShapeError(VqkitError):
    """Array dimensions do not match what the operation requires."""


class DegenerateInputError(VqkitError):
    """Input samples cannot support the requested distribution fit."""


class SidecarFormatError(VqkitError):
    """Binary sidecar file is structurally invalid (magic, size, payload)."""


class AlignmentError(VqkitError):
    """Sidecar row count disagrees with the chunk schedule."""


class DataError(VqkitError):
    """Non-finite or otherwise unusable numeric payload."""


class RangeError(VqkitError):
    """Value outside its declared scale or range."""


class PreconditionError(VqkitError):
    """Operation called with inputs that violate its stated preconditions."""
