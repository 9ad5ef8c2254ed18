"""End-to-end KLT-only and FCT+KLT compression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..blockscan import SubBlockStack, reflect_pad, stack_to_plane, tile_to_stack
from ..dct2d import dct2_forward, dct2_inverse
from ..errors import ConfigError, DimensionError
from ..klt import KltBasis, fit_basis, klt_forward, klt_inverse
from ..raster import ImageRaster, clamp_to_raster, round_half_away
from ..reduce import (
    MAX_QUANT_BITS,
    QuantizedStack,
    dequantize,
    prune,
    quantize,
    quantize_with_step,
    select_channels,
    zero_pad,
)
from .container import CompressedContainer
from .entropy import entropy_decode, entropy_encode

__all__ = [
    "PIPELINES",
    "CodecConfig",
    "Analysis",
    "analyze",
    "encode",
    "compress",
    "decompress",
    "fold_symbols",
    "unfold_symbols",
]

PIPELINES = {"klt": 0, "fct-klt": 1}
PIPELINE_NAMES = {v: k for k, v in PIPELINES.items()}


@dataclass(frozen=True)
class CodecConfig:
    """Encoder settings.

    ``step`` switches from the per-channel min/max quantiser to a common
    step size for all retained channels; ``quant_bits`` then caps the bit
    depth. ``channels`` fixes the retained channel count and overrides
    ``keep_fraction``.
    """

    pipeline: str = "fct-klt"
    block_size: int = 64
    keep_fraction: float = 0.95
    quant_bits: int = 8
    pad: bool = False
    step: float | None = None
    channels: int | None = None

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"pipeline must be one of {sorted(PIPELINES)}, got {self.pipeline!r}")
        if not 2 <= self.block_size <= 0xFFFF:
            raise ConfigError(f"block size must be in [2, 65535], got {self.block_size}")
        if not 0.0 < self.keep_fraction <= 1.0:
            raise ConfigError(f"keep_fraction must be in (0, 1], got {self.keep_fraction}")
        if not 1 <= self.quant_bits <= MAX_QUANT_BITS:
            raise ConfigError(f"quant_bits must be in [1, {MAX_QUANT_BITS}], got {self.quant_bits}")
        if self.step is not None and not (self.step > 0 and np.isfinite(self.step)):
            raise ConfigError(f"step must be positive, got {self.step}")
        if self.channels is not None and self.channels < 1:
            raise ConfigError(f"channels must be >= 1, got {self.channels}")


@dataclass(frozen=True)
class Analysis:
    """Transform stage shared by every rate setting: the full KLT of one image."""

    pipeline: str
    orig_rows: int
    orig_cols: int
    basis: KltBasis
    coefficients: SubBlockStack

    @property
    def rows(self) -> int:
        return self.coefficients.grid_rows * self.coefficients.block_size

    @property
    def cols(self) -> int:
        return self.coefficients.grid_cols * self.coefficients.block_size

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.basis.eigenvalues


def analyze(img: ImageRaster, pipeline: str = "fct-klt", block_size: int = 64, pad: bool = False) -> Analysis:
    """Optional whole-image DCT, zig-zag tiling and KLT fitting."""
    if pipeline not in PIPELINES:
        raise ConfigError(f"pipeline must be one of {sorted(PIPELINES)}, got {pipeline!r}")
    if img.bit_depth != 8:
        raise ConfigError(f"only 8-bit rasters are supported, got bit_depth {img.bit_depth}")
    if block_size < 2:
        raise ConfigError(f"block size must be at least 2, got {block_size}")
    plane = img.to_float()
    if pad:
        plane = reflect_pad(plane, block_size)
    if pipeline == "fct-klt":
        if plane.shape[0] % block_size or plane.shape[1] % block_size:
            tile_to_stack(plane, block_size)  # raises the divisibility error
        plane = dct2_forward(plane)
    stack = tile_to_stack(plane, block_size)
    basis = fit_basis(stack)
    return Analysis(pipeline, img.rows, img.cols, basis, klt_forward(stack, basis))


def _zero_symbol(offsets: np.ndarray, steps: np.ndarray, levels: int) -> np.ndarray:
    z = round_half_away(-offsets.astype(np.float64) / steps.astype(np.float64))
    return np.clip(z, 0, levels - 1).astype(np.int64)


def fold_symbols(symbols: np.ndarray, zero: np.ndarray, levels: int) -> np.ndarray:
    """Per-channel bijection of [0, levels) ranking symbols by distance from ``zero``.

    The symbol that dequantises closest to 0 becomes 0, its neighbours 1
    and 2, and so on, so near-zero coefficients of every channel share the
    smallest codes and form runs of symbol 0.
    """
    z = zero[:, None]
    d = symbols - z
    lim = np.minimum(z, levels - 1 - z)
    folded = np.where(d > 0, 2 * d - 1, -2 * d)
    return np.where(np.abs(d) > lim, lim + np.abs(d), folded)


def unfold_symbols(folded: np.ndarray, zero: np.ndarray, levels: int) -> np.ndarray:
    z = zero[:, None]
    lim = np.minimum(z, levels - 1 - z)
    up = (folded + 1) // 2
    inner = np.where(folded % 2 == 1, z + up, z - folded // 2)
    beyond = folded - lim
    upper_side = levels - 1 - z > z
    outer = np.where(upper_side, z + beyond, z - beyond)
    return np.where(folded > 2 * lim, outer, inner)


def _as_float32_params(pruned: SubBlockStack, qs: QuantizedStack) -> QuantizedStack:
    """Requantise against float32-rounded parameters, exactly as the decoder will see them."""
    offsets = qs.offsets.astype(np.float32)
    steps = np.maximum(qs.steps.astype(np.float32), np.finfo(np.float32).tiny)
    levels = 1 << qs.quant_bits
    x = pruned.vectors()
    o = offsets.astype(np.float64)[:, None]
    s = steps.astype(np.float64)[:, None]
    symbols = np.clip(np.floor((x - o) / s + 0.5), 0, levels - 1).astype(np.int64)
    return QuantizedStack(symbols, o[:, 0], s[:, 0], qs.quant_bits, qs.block_size, qs.grid_rows, qs.grid_cols)


def encode(analysis: Analysis, config: CodecConfig) -> CompressedContainer:
    """Prune, quantise and entropy-code an analysed image."""
    if config.pipeline != analysis.pipeline:
        raise ConfigError(f"analysis is for {analysis.pipeline!r}, config asks for {config.pipeline!r}")
    coeffs = analysis.coefficients
    lam = analysis.eigenvalues
    if config.channels is not None:
        m = min(config.channels, coeffs.channels)
    else:
        m = select_channels(lam, config.keep_fraction)
    pruned = prune(coeffs, m)
    if config.step is None:
        qs = quantize(pruned, config.quant_bits)
    else:
        qs = quantize_with_step(pruned, config.step, max_bits=config.quant_bits)
    qs = _as_float32_params(pruned, qs)
    levels = 1 << qs.quant_bits
    zero = _zero_symbol(qs.offsets, qs.steps, levels)
    payload = entropy_encode(fold_symbols(qs.symbols, zero, levels), qs.quant_bits)
    return CompressedContainer(
        pipeline=PIPELINES[analysis.pipeline],
        rows=analysis.rows,
        cols=analysis.cols,
        orig_rows=analysis.orig_rows,
        orig_cols=analysis.orig_cols,
        block_size=coeffs.block_size,
        n=coeffs.n,
        m=m,
        quant_bits=qs.quant_bits,
        mean=analysis.basis.mean,
        eigenvectors=analysis.basis.eigenvectors[:, :m],
        offsets=qs.offsets,
        steps=qs.steps,
        eigenvalues=lam,
        payload=payload,
    )


def compress(img: ImageRaster, config: CodecConfig | None = None) -> CompressedContainer:
    config = config or CodecConfig()
    if not config.pad:
        if img.rows % config.block_size or img.cols % config.block_size:
            tile_to_stack(np.zeros((img.rows, img.cols)), config.block_size)
    return encode(analyze(img, config.pipeline, config.block_size, config.pad), config)


def decompress(container: CompressedContainer) -> ImageRaster:
    """Decode a container back to an 8-bit raster of the original size."""
    c = container
    b = c.block_size
    levels = 1 << c.quant_bits
    folded = entropy_decode(c.payload, c.quant_bits, expected=c.symbol_count).reshape(c.m, b * b)
    offsets = c.offsets.astype(np.float64)
    steps = c.steps.astype(np.float64)
    symbols = unfold_symbols(folded, _zero_symbol(offsets, steps, levels), levels)
    grid_rows, grid_cols = c.rows // b, c.cols // b
    qs = QuantizedStack(symbols, offsets, steps, c.quant_bits, b, grid_rows, grid_cols)
    channels = zero_pad(dequantize(qs), c.n)
    vectors = np.zeros((c.n, c.n))
    vectors[:, : c.m] = c.eigenvectors
    basis = KltBasis(c.mean.astype(np.float64), vectors, c.eigenvalues.astype(np.float64))
    plane = stack_to_plane(klt_inverse(channels, basis))
    if c.pipeline == PIPELINES["fct-klt"]:
        plane = dct2_inverse(plane)
    if plane.shape != (c.rows, c.cols):
        raise DimensionError("reconstructed plane has unexpected shape")
    return clamp_to_raster(plane[: c.orig_rows, : c.orig_cols], bit_depth=8)
