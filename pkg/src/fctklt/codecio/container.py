"""The ``.fkz`` compressed container.

Byte layout, little-endian throughout::

    offset  size      field
    0       4         magic b"FKZ1"
    4       1         version (1)
    5       1         pipeline (0 = KLT only, 1 = FCT + KLT)
    6       4         rows        (coded plane, after padding)
    10      4         cols
    14      4         orig_rows   (before padding)
    18      4         orig_cols
    22      2         block_size B
    24      2         n           (number of sub-blocks)
    26      2         m           (retained channels)
    28      1         quant_bits q
    29      4n        mean vector, float32
    ..      4nm       retained eigenvectors, float32, column-major (n x m)
    ..      8m        per-channel (offset, step) float32 pairs
    ..      4n        full eigenvalue spectrum, float32, descending
    ..      8         payload_len
    ..      payload_len  entropy-coded symbols
"""

from __future__ import annotations

import os
import struct
import sys
from dataclasses import dataclass

import numpy as np

from ..errors import BadMagicError, CorruptPayloadError, TruncatedStreamError

__all__ = ["CompressedContainer", "MAGIC", "VERSION", "read_container", "write_container"]

MAGIC = b"FKZ1"
VERSION = 1
_HEADER = struct.Struct("<4sBBIIIIHHHB")
_PAYLOAD_LEN = struct.Struct("<Q")
MAX_SAMPLES = 1 << 30


@dataclass(frozen=True, eq=False)
class CompressedContainer:
    pipeline: int
    rows: int
    cols: int
    orig_rows: int
    orig_cols: int
    block_size: int
    n: int
    m: int
    quant_bits: int
    mean: np.ndarray
    eigenvectors: np.ndarray
    offsets: np.ndarray
    steps: np.ndarray
    eigenvalues: np.ndarray
    payload: bytes

    def __post_init__(self):
        for name, shape in (
            ("mean", (self.n,)),
            ("eigenvectors", (self.n, self.m)),
            ("offsets", (self.m,)),
            ("steps", (self.m,)),
            ("eigenvalues", (self.n,)),
        ):
            arr = np.asarray(getattr(self, name), dtype=np.float32)
            if arr.shape != shape:
                raise CorruptPayloadError(f"{name} has shape {arr.shape}, expected {shape}")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "payload", bytes(self.payload))
        self._validate()

    def _validate(self):
        b = self.block_size
        if self.pipeline not in (0, 1):
            raise CorruptPayloadError(f"unknown pipeline id {self.pipeline}")
        if b < 1 or self.rows < 1 or self.cols < 1 or self.rows % b or self.cols % b:
            raise CorruptPayloadError(f"plane {self.rows}x{self.cols} does not tile into {b}x{b} blocks")
        if self.rows * self.cols > MAX_SAMPLES:
            raise CorruptPayloadError(f"plane {self.rows}x{self.cols} exceeds size limit")
        if self.n != (self.rows // b) * (self.cols // b):
            raise CorruptPayloadError(f"n={self.n} does not match the block grid")
        if not 1 <= self.m <= self.n:
            raise CorruptPayloadError(f"m={self.m} outside [1, {self.n}]")
        if not 1 <= self.quant_bits <= 16:
            raise CorruptPayloadError(f"quant_bits={self.quant_bits} outside [1, 16]")
        if not (0 < self.orig_rows <= self.rows and self.rows - self.orig_rows < b):
            raise CorruptPayloadError(f"orig_rows={self.orig_rows} inconsistent with rows={self.rows}")
        if not (0 < self.orig_cols <= self.cols and self.cols - self.orig_cols < b):
            raise CorruptPayloadError(f"orig_cols={self.orig_cols} inconsistent with cols={self.cols}")
        for name in ("mean", "eigenvectors", "offsets", "steps", "eigenvalues"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise CorruptPayloadError(f"{name} contains non-finite values")
        if np.any(self.steps <= 0):
            raise CorruptPayloadError("quantiser steps must be positive")

    @property
    def symbol_count(self) -> int:
        return self.m * self.block_size * self.block_size

    def to_bytes(self) -> bytes:
        parts = [
            _HEADER.pack(
                MAGIC, VERSION, self.pipeline, self.rows, self.cols, self.orig_rows,
                self.orig_cols, self.block_size, self.n, self.m, self.quant_bits,
            ),
            self.mean.astype("<f4").tobytes(),
            self.eigenvectors.astype("<f4").tobytes(order="F"),
            np.stack([self.offsets, self.steps], axis=1).astype("<f4").tobytes(),
            self.eigenvalues.astype("<f4").tobytes(),
            _PAYLOAD_LEN.pack(len(self.payload)),
            self.payload,
        ]
        return b"".join(parts)

    def __len__(self) -> int:
        return _HEADER.size + 4 * (2 * self.n + self.n * self.m + 2 * self.m) + _PAYLOAD_LEN.size + len(self.payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedContainer":
        data = bytes(data)
        if len(data) < 5:
            if MAGIC.startswith(data[:4]):
                raise TruncatedStreamError("truncated stream: container header cut short")
            raise BadMagicError("bad magic: not an FKZ container")
        if data[:4] != MAGIC:
            raise BadMagicError(f"bad magic {data[:4]!r}")
        if data[4] != VERSION:
            raise BadMagicError(f"unsupported container version {data[4]}")
        if len(data) < _HEADER.size:
            raise TruncatedStreamError("truncated stream: container header cut short")
        (_, _, pipeline, rows, cols, orig_rows, orig_cols, b, n, m, q) = _HEADER.unpack_from(data, 0)
        if m > n:
            raise CorruptPayloadError(f"m={m} exceeds n={n}")
        pos = _HEADER.size

        def floats(count):
            nonlocal pos
            end = pos + 4 * count
            if end > len(data):
                raise TruncatedStreamError("truncated stream: side information cut short")
            arr = np.frombuffer(data, dtype="<f4", count=count, offset=pos)
            pos = end
            return arr

        mean = floats(n)
        vecs = floats(n * m).reshape((n, m), order="F")
        params = floats(2 * m).reshape(m, 2)
        spectrum = floats(n)
        if pos + _PAYLOAD_LEN.size > len(data):
            raise TruncatedStreamError("truncated stream: payload length missing")
        (payload_len,) = _PAYLOAD_LEN.unpack_from(data, pos)
        pos += _PAYLOAD_LEN.size
        if pos + payload_len > len(data):
            raise TruncatedStreamError(
                f"truncated stream: payload declares {payload_len} bytes, {len(data) - pos} present"
            )
        if pos + payload_len < len(data):
            raise CorruptPayloadError(f"{len(data) - pos - payload_len} trailing bytes after payload")
        return cls(
            pipeline, rows, cols, orig_rows, orig_cols, b, n, m, q,
            mean, vecs, params[:, 0], params[:, 1], spectrum, data[pos:],
        )

    def equals(self, other: "CompressedContainer") -> bool:
        return self.to_bytes() == other.to_bytes()


def write_container(container: CompressedContainer, path: str | os.PathLike) -> None:
    """Write to ``path``; ``"-"`` means standard output."""
    data = container.to_bytes()
    if str(path) == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


def read_container(path: str | os.PathLike) -> CompressedContainer:
    """Read from ``path``; ``"-"`` means standard input."""
    if str(path) == "-":
        return CompressedContainer.from_bytes(sys.stdin.buffer.read())
    with open(path, "rb") as fh:
        return CompressedContainer.from_bytes(fh.read())
