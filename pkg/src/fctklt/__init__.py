"""Lossy grayscale image compression with a cross-block KLT, optionally
preceded by a whole-image fast DCT."""

from .blockscan import SubBlockStack, stack_to_plane, tile_to_stack, zigzag_order
from .codecio.container import CompressedContainer, read_container, write_container
from .codecio.entropy import entropy_decode, entropy_encode
from .codecio.pipeline import CodecConfig, analyze, compress, decompress, encode
from .dct2d import dct2_forward, dct2_inverse, dct2_reference, dct_matrix
from .errors import FkzError
from .klt import KltBasis, fit_basis, klt_forward, klt_inverse
from .metrics import MetricsReport, report
from .raster import ImageRaster, clamp_to_raster, load_pgm, save_pgm

__version__ = "0.1.0"

__all__ = [
    "CodecConfig",
    "CompressedContainer",
    "FkzError",
    "ImageRaster",
    "KltBasis",
    "MetricsReport",
    "SubBlockStack",
    "analyze",
    "clamp_to_raster",
    "compress",
    "dct2_forward",
    "dct2_inverse",
    "dct2_reference",
    "dct_matrix",
    "decompress",
    "encode",
    "entropy_decode",
    "entropy_encode",
    "fit_basis",
    "klt_forward",
    "klt_inverse",
    "load_pgm",
    "read_container",
    "report",
    "save_pgm",
    "stack_to_plane",
    "tile_to_stack",
    "write_container",
    "zigzag_order",
]
