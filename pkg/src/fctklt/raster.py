"""8-bit grayscale rasters and binary PGM (P5) I/O."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FormatError, UnsupportedFormatError

__all__ = [
    "ImageRaster",
    "load_pgm",
    "save_pgm",
    "parse_pgm",
    "format_pgm",
    "clamp_to_raster",
    "round_half_away",
]


@dataclass(frozen=True)
class ImageRaster:
    """A rows x cols grid of unsigned integer samples.

    ``samples`` is stored as a read-only 2-D array; construct from any integer
    array-like and it is copied and validated.
    """

    samples: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        if not 1 <= self.bit_depth <= 16:
            raise DimensionError(f"bit_depth must be in [1, 16], got {self.bit_depth}")
        arr = np.asarray(self.samples)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"samples must be a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype.kind not in "iub":
            if not np.all(np.isfinite(arr)) or not np.array_equal(arr, np.round(arr)):
                raise DimensionError("samples must be integers")
        top = (1 << self.bit_depth) - 1
        if arr.size and (arr.min() < 0 or arr.max() > top):
            raise DimensionError(f"samples must lie in [0, {top}]")
        dtype = np.uint8 if self.bit_depth <= 8 else np.uint16
        arr = arr.astype(dtype, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def rows(self) -> int:
        return self.samples.shape[0]

    @property
    def cols(self) -> int:
        return self.samples.shape[1]

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    def to_float(self) -> np.ndarray:
        return self.samples.astype(np.float64)

    def __eq__(self, other):
        if not isinstance(other, ImageRaster):
            return NotImplemented
        return self.bit_depth == other.bit_depth and np.array_equal(self.samples, other.samples)

    __hash__ = None


_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def parse_pgm(data: bytes) -> ImageRaster:
    """Decode the bytes of a binary PGM file."""
    if data[:2] != b"P5":
        if len(data) >= 2 and data[:1] == b"P" and data[1:2] in b"123467":
            raise UnsupportedFormatError(f"unsupported format {data[:2].decode('ascii')}: only binary PGM (P5)")
        raise FormatError("not a PGM file (missing P5 magic)")
    pos = 2
    fields = []
    for _ in range(3):
        match = _TOKEN.match(data, pos)
        if match is None:
            raise FormatError("malformed PGM header")
        token = match.group(1)
        if not token.isdigit():
            raise FormatError(f"malformed PGM header field {token!r}")
        fields.append(int(token))
        pos = match.end()
    cols, rows, maxval = fields
    if pos >= len(data) or data[pos : pos + 1] not in (b" ", b"\t", b"\n", b"\r", b"\v", b"\f"):
        raise FormatError("malformed PGM header: expected whitespace before raster")
    pos += 1
    if rows < 1 or cols < 1:
        raise FormatError(f"invalid PGM dimensions {cols}x{rows}")
    if maxval < 1:
        raise FormatError(f"invalid PGM maxval {maxval}")
    if maxval > 255:
        raise UnsupportedFormatError(f"unsupported maxval {maxval}: only 8-bit PGM")
    need = rows * cols
    body = data[pos : pos + need]
    if len(body) < need:
        raise FormatError(f"PGM raster truncated: expected {need} bytes, found {len(body)}")
    samples = np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)
    if samples.max() > maxval:
        raise FormatError(f"sample exceeds declared maxval {maxval}")
    return ImageRaster(samples, bit_depth=8)


def format_pgm(img: ImageRaster) -> bytes:
    if img.bit_depth > 8:
        raise UnsupportedFormatError(f"PGM output supports bit_depth <= 8, got {img.bit_depth}")
    header = f"P5\n{img.cols} {img.rows}\n{img.max_value}\n".encode("ascii")
    return header + img.samples.astype(np.uint8).tobytes()


def load_pgm(path: str | os.PathLike) -> ImageRaster:
    """Read a binary (P5) 8-bit PGM file."""
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def save_pgm(img: ImageRaster, path: str | os.PathLike) -> None:
    """Write ``img`` as a binary PGM; ``load_pgm`` returns an equal raster."""
    data = format_pgm(img)
    with open(path, "wb") as fh:
        fh.write(data)


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero (platform independent)."""
    values = np.asarray(values, dtype=np.float64)
    return np.copysign(np.floor(np.abs(values) + 0.5), values)


def clamp_to_raster(plane: np.ndarray, bit_depth: int = 8) -> ImageRaster:
    """Round a real-valued plane and clip it into the sample range."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2 or plane.size == 0:
        raise DimensionError(f"expected a non-empty 2-D plane, got shape {plane.shape}")
    top = (1 << bit_depth) - 1
    plane = np.nan_to_num(plane, nan=0.0, posinf=top, neginf=0.0)
    return ImageRaster(np.clip(round_half_away(plane), 0, top), bit_depth=bit_depth)
