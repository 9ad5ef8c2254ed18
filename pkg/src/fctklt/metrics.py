"""Reconstruction, rate and eigenvalue-spectrum metrics."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionError, FkzError
from .raster import ImageRaster

__all__ = [
    "MetricsReport",
    "cr",
    "bpp_ac",
    "bpp_from_bits",
    "mae",
    "mse",
    "psnr",
    "fgp",
    "frp",
    "fp",
    "spectrum_metrics",
    "report",
    "REPORT_KEYS",
]

# field name -> serialised key
REPORT_KEYS = {
    "mae": "mae",
    "mse": "mse",
    "psnr": "psnr_db",
    "cr": "cr",
    "bpp_ac": "bpp",
    "etime": "etime_s",
    "fgp": "fgp",
    "frp": "frp",
    "fp": "fp",
}


def cr(uncompressed_size: float, compressed_size: float) -> float:
    if compressed_size <= 0:
        raise FkzError("compressed size must be positive")
    return uncompressed_size / compressed_size


def bpp_ac(bpp_bc: float, cr_value: float) -> float:
    """Bits per pixel after compression from the ratio: bpp_bc / CR."""
    if cr_value <= 0:
        raise FkzError("compression ratio must be positive")
    return bpp_bc / cr_value


def bpp_from_bits(coded_bits: float, pixels: int) -> float:
    """Bits per pixel after compression from the coded size: bits / pixels."""
    if pixels <= 0:
        raise FkzError("pixel count must be positive")
    return coded_bits / pixels


def _pair(a: ImageRaster, b: ImageRaster) -> np.ndarray:
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise DimensionError(f"image sizes differ: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    return a.to_float() - b.to_float()


def mae(a: ImageRaster, b: ImageRaster) -> float:
    return float(np.mean(np.abs(_pair(a, b))))


def mse(a: ImageRaster, b: ImageRaster) -> float:
    return float(np.mean(_pair(a, b) ** 2))


def psnr(mse_value: float, bit_depth: int = 8) -> float:
    """PSNR in dB with peak 2**bit_depth - 1; +inf for a perfect match."""
    if mse_value < 0:
        raise FkzError("mse must be non-negative")
    if mse_value == 0:
        return math.inf
    peak = (1 << bit_depth) - 1
    return 10.0 * math.log10(peak * peak / mse_value)


def _spectrum(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=np.float64).reshape(-1)
    if lam.size < 2:
        raise FkzError("spectrum needs at least two eigenvalues")
    if lam[0] <= 0:
        raise FkzError("largest eigenvalue must be positive")
    return lam


def fgp(lam) -> float:
    """First gap percent: (1 - l2/l1) * 100."""
    lam = _spectrum(lam)
    return (1.0 - lam[1] / lam[0]) * 100.0


def frp(lam) -> float:
    """First vs rest percent: (1 - (l2 - lN)/l1) * 100."""
    lam = _spectrum(lam)
    return (1.0 - (lam[1] - lam[-1]) / lam[0]) * 100.0


def fp(lam) -> float:
    """Weight of the largest eigenvalue in the whole spectrum, in percent."""
    lam = np.asarray(lam, dtype=np.float64).reshape(-1)
    total = float(lam.sum())
    if lam.size == 0 or total <= 0:
        raise FkzError("spectrum total must be positive")
    return lam[0] / total * 100.0


def spectrum_metrics(lam) -> dict[str, float | None]:
    """FGP, FRP and FP, with None where the spectrum is degenerate."""
    out = {}
    for name, fn in (("fgp", fgp), ("frp", frp), ("fp", fp)):
        try:
            out[name] = float(fn(lam))
        except FkzError:
            out[name] = None
    return out


@dataclass(frozen=True)
class MetricsReport:
    mae: float
    mse: float
    psnr: float
    cr: float | None = None
    bpp_ac: float | None = None
    etime: float | None = None
    fgp: float | None = None
    frp: float | None = None
    fp: float | None = None

    def to_dict(self) -> dict:
        out = {}
        for field, key in REPORT_KEYS.items():
            value = getattr(self, field)
            if isinstance(value, float) and math.isinf(value):
                value = "inf"
            out[key] = value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        row = self.to_dict()
        writer.writerow(row.keys())
        writer.writerow("" if v is None else v for v in row.values())
        return buf.getvalue()

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if value is None:
                shown = "-"
            elif isinstance(value, str):
                shown = value
            else:
                shown = f"{value:.4f}"
            lines.append(f"{key:<8} {shown}")
        return "\n".join(lines) + "\n"

    def format(self, kind: str) -> str:
        if kind == "json":
            return self.to_json() + "\n"
        if kind == "csv":
            return self.to_csv()
        if kind == "text":
            return self.to_text()
        raise FkzError(f"unknown report format {kind!r}")


def report(original: ImageRaster, reconstructed: ImageRaster, container=None, eigenvalues=None, elapsed=None) -> MetricsReport:
    """Collect every metric available from the given inputs.

    Rate metrics need ``container``; the uncompressed size is the raw
    sample payload rows*cols*bit_depth/8. Spectrum metrics use
    ``eigenvalues``, falling back to the spectrum stored in the container.
    """
    err_mse = mse(original, reconstructed)
    ratio = bpp = None
    if container is not None:
        size = len(container.to_bytes())
        raw = original.rows * original.cols * original.bit_depth / 8
        ratio = cr(raw, size)
        bpp = bpp_ac(original.bit_depth, ratio)
        if eigenvalues is None:
            eigenvalues = container.eigenvalues
    spectral = spectrum_metrics(eigenvalues) if eigenvalues is not None else {}
    return MetricsReport(
        mae=mae(original, reconstructed),
        mse=err_mse,
        psnr=psnr(err_mse, original.bit_depth),
        cr=ratio,
        bpp_ac=bpp,
        etime=None if elapsed is None else round(float(elapsed), 4),
        **spectral,
    )
