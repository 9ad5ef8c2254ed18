"""Exception types raised by the codec.

Everything derives from :class:`FkzError` so callers (and the CLI) can catch
one class for any domain failure.
"""


class FkzError(ValueError):
    """Base class for all codec errors."""


class FormatError(FkzError):
    """An input image file is malformed."""


class UnsupportedFormatError(FormatError):
    """An input image file is valid but not a supported variant."""


class DimensionError(FkzError):
    """Array shapes are incompatible with the requested operation."""


class ConfigError(FkzError):
    """A configuration value is outside its allowed range."""


class TruncatedStreamError(FkzError):
    """A byte stream ended before all declared data was read."""


class MalformedCodeTableError(FkzError):
    """An entropy-coded stream declares an impossible prefix code."""


class CorruptPayloadError(FkzError):
    """Coded data is inconsistent with its header."""


class BadMagicError(FkzError):
    """A container does not start with the expected magic bytes or version."""
