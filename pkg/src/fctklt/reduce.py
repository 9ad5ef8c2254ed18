"""Channel pruning and scalar quantisation of KLT eigen-channels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockscan import SubBlockStack
from .errors import ConfigError, DimensionError

__all__ = [
    "QuantizedStack",
    "select_channels",
    "prune",
    "zero_pad",
    "quantize",
    "quantize_with_step",
    "dequantize",
    "MAX_QUANT_BITS",
]

MAX_QUANT_BITS = 16


@dataclass(frozen=True)
class QuantizedStack:
    """Integer symbols for ``m`` channels plus per-channel ``offset`` and ``step``.

    ``symbols`` has shape (m, B*B) with values in [0, 2**quant_bits - 1];
    a channel dequantises as ``offset + symbol * step``.
    """

    symbols: np.ndarray
    offsets: np.ndarray
    steps: np.ndarray
    quant_bits: int
    block_size: int
    grid_rows: int
    grid_cols: int

    def __post_init__(self):
        if not 1 <= self.quant_bits <= MAX_QUANT_BITS:
            raise ConfigError(f"quant_bits must be in [1, {MAX_QUANT_BITS}], got {self.quant_bits}")
        symbols = np.asarray(self.symbols, dtype=np.int64)
        m = symbols.shape[0]
        if symbols.shape != (m, self.block_size * self.block_size):
            raise DimensionError(f"symbols shape {symbols.shape} does not match block size {self.block_size}")
        if m > self.grid_rows * self.grid_cols:
            raise DimensionError("more channels than grid cells")
        offsets = np.asarray(self.offsets, dtype=np.float64).reshape(-1)
        steps = np.asarray(self.steps, dtype=np.float64).reshape(-1)
        if offsets.shape != (m,) or steps.shape != (m,):
            raise DimensionError("need one offset and one step per channel")
        if np.any(~(steps > 0)) or not np.all(np.isfinite(steps)) or not np.all(np.isfinite(offsets)):
            raise DimensionError("steps must be positive and offsets finite")
        if symbols.size and (symbols.min() < 0 or symbols.max() > (1 << self.quant_bits) - 1):
            raise DimensionError(f"symbols out of range for {self.quant_bits} bits")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "steps", steps)

    @property
    def channels(self) -> int:
        return self.symbols.shape[0]


def select_channels(eigenvalues, keep_fraction: float) -> int:
    """Smallest m whose leading eigenvalues hold ``keep_fraction`` of the total variance."""
    if not 0.0 < keep_fraction <= 1.0:
        raise ConfigError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if lam.size == 0:
        raise DimensionError("empty spectrum")
    total = float(lam.sum())
    if total <= 0:
        return 1
    fractions = np.cumsum(lam) / total
    # guard the final comparison against round-off in the cumulative sum
    fractions[-1] = 1.0
    return max(1, int(np.searchsorted(fractions, keep_fraction, side="left")) + 1)


def prune(stack: SubBlockStack, m: int) -> SubBlockStack:
    """Keep the first ``m`` channels."""
    if not 1 <= m <= stack.channels:
        raise ConfigError(f"m must be in [1, {stack.channels}], got {m}")
    return SubBlockStack(stack.blocks[:m].copy(), stack.grid_rows, stack.grid_cols)


def zero_pad(pruned: SubBlockStack, n: int) -> SubBlockStack:
    """Append all-zero channels up to ``n``."""
    if n < pruned.channels:
        raise ConfigError(f"cannot pad {pruned.channels} channels down to {n}")
    b = pruned.block_size
    blocks = np.zeros((n, b, b))
    blocks[: pruned.channels] = pruned.blocks
    return SubBlockStack(blocks, pruned.grid_rows, pruned.grid_cols)


def _symbols(values, offsets, steps, levels):
    scaled = (values - offsets[:, None]) / steps[:, None]
    return np.clip(np.floor(scaled + 0.5), 0, levels - 1).astype(np.int64)


def _package(stack, symbols, offsets, steps, q):
    return QuantizedStack(
        symbols, offsets, steps, q, stack.block_size, stack.grid_rows, stack.grid_cols
    )


def quantize(stack: SubBlockStack, q: int) -> QuantizedStack:
    """Per-channel uniform quantiser spanning each channel's [min, max] with 2**q levels."""
    if not 1 <= q <= MAX_QUANT_BITS:
        raise ConfigError(f"quant_bits must be in [1, {MAX_QUANT_BITS}], got {q}")
    x = stack.vectors()
    lo = x.min(axis=1)
    hi = x.max(axis=1)
    levels = 1 << q
    steps = (hi - lo) / (levels - 1)
    steps[hi == lo] = 1.0
    return _package(stack, _symbols(x, lo, steps, levels), lo, steps, q)


def quantize_with_step(stack: SubBlockStack, step: float, max_bits: int = MAX_QUANT_BITS) -> QuantizedStack:
    """Quantise every channel with one common step size.

    Offsets are the channel minima snapped down onto the ``step`` grid so
    that zero stays a reconstruction level. The bit depth is the smallest
    that holds every channel's range; :class:`ConfigError` if that exceeds
    ``max_bits``.
    """
    if not (step > 0 and math.isfinite(step)):
        raise ConfigError(f"step must be positive and finite, got {step}")
    x = stack.vectors()
    offsets = np.floor(x.min(axis=1) / step) * step
    top = int(np.max(np.floor((x.max(axis=1) - offsets) / step + 0.5)))
    q = max(1, top.bit_length())
    if q > max_bits:
        raise ConfigError(f"step {step:g} needs {q} bits, more than {max_bits}")
    steps = np.full(stack.channels, float(step))
    return _package(stack, _symbols(x, offsets, steps, 1 << q), offsets, steps, q)


def dequantize(qs: QuantizedStack) -> SubBlockStack:
    values = qs.offsets[:, None] + qs.symbols * qs.steps[:, None]
    b = qs.block_size
    return SubBlockStack(values.reshape(qs.channels, b, b), qs.grid_rows, qs.grid_cols)
