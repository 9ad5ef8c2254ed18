"""KLT-only vs FCT+KLT at a matched container size.

For each pipeline the retained channel count and a common quantiser step
are tuned so the container lands just under a byte budget; the setting with
the highest PSNR wins. Both pipelines therefore compete at the same rate.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .codecio.container import CompressedContainer
from .codecio.pipeline import PIPELINES, Analysis, CodecConfig, analyze, decompress, encode
from .errors import ConfigError, FkzError
from .metrics import MetricsReport, mse, psnr, report
from .raster import ImageRaster

__all__ = ["RateMatch", "match_rate", "bench", "format_table", "TABLE_ROWS"]

SIZE_TOLERANCE = 0.004
TABLE_ROWS = ("mae", "mse", "psnr", "cr", "bpp_ac", "etime", "fgp", "frp", "fp")


@dataclass(frozen=True)
class RateMatch:
    pipeline: str
    config: CodecConfig
    container: CompressedContainer
    reconstructed: ImageRaster
    psnr: float
    report: MetricsReport


def _fit_step(analysis: Analysis, base: CodecConfig, budget: int):
    """Largest-size container not exceeding ``budget`` over the step size (log bisection)."""
    lo, hi = math.log(1e-3), math.log(1e6)
    best = None
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        try:
            c = encode(analysis, CodecConfig(**{**base.__dict__, "step": math.exp(mid)}))
        except ConfigError:
            lo = mid  # step too fine for 16 bits
            continue
        size = len(c)
        if size <= budget:
            hi = mid
            if best is None or size > len(best):
                best = c
            if size >= (1 - SIZE_TOLERANCE) * budget:
                break
        else:
            lo = mid
    return best


def _score(container: CompressedContainer, img: ImageRaster) -> tuple[float, ImageRaster]:
    rec = decompress(container)
    return psnr(mse(img, rec)), rec


def match_rate(img: ImageRaster, pipeline: str, budget: int, block_size: int = 64, analysis: Analysis | None = None) -> RateMatch:
    """Best-PSNR container of at most ``budget`` bytes for one pipeline."""
    if analysis is None:
        analysis = analyze(img, pipeline, block_size)
    n = analysis.basis.n
    tried: dict[int, tuple] = {}

    def trial(m):
        if m in tried or not 1 <= m <= n:
            return
        base = CodecConfig(pipeline, block_size=block_size, keep_fraction=1.0, quant_bits=16, channels=m)
        c = _fit_step(analysis, base, budget)
        if c is None:
            tried[m] = None
            return
        q, rec = _score(c, img)
        tried[m] = (q, c, rec, CodecConfig(**{**base.__dict__, "step": float(c.steps[0])}))

    coarse = sorted({1} | {max(1, round(n * f / 8)) for f in range(1, 9)})
    for m in coarse:
        trial(m)
    # refine around the best coarse point
    for _ in range(3):
        scored = {m: v for m, v in tried.items() if v is not None}
        if not scored:
            break
        centre = max(scored, key=lambda m: (scored[m][0], -m))
        span = max(1, n // 16)
        for m in range(centre - span, centre + span + 1):
            trial(m)
    scored = {m: v for m, v in tried.items() if v is not None}
    if not scored:
        raise FkzError(f"no {pipeline} container fits in {budget} bytes")
    m = max(scored, key=lambda k: (scored[k][0], -k))
    q, c, _, cfg = scored[m]

    # time a clean compress + decompress of the chosen setting
    start = time.perf_counter()
    chosen = encode(analyze(img, pipeline, block_size), cfg)
    rec = decompress(CompressedContainer.from_bytes(chosen.to_bytes()))
    elapsed = time.perf_counter() - start
    return RateMatch(pipeline, cfg, chosen, rec, q, report(img, rec, chosen, elapsed=elapsed))


def bench(img: ImageRaster, block_size: int = 64, target_cr: float = 4.0) -> dict[str, RateMatch]:
    """Run both pipelines at the byte budget implied by ``target_cr``."""
    if target_cr <= 0:
        raise ConfigError("target CR must be positive")
    budget = int(img.rows * img.cols * img.bit_depth / 8 / target_cr)
    return {name: match_rate(img, name, budget, block_size) for name in PIPELINES}


def format_table(results: dict[str, RateMatch], kind: str = "csv") -> str:
    """Metric rows x pipeline columns, in the layout of a two-codec comparison table."""
    names = list(results)
    rows = []
    for field in TABLE_ROWS:
        key = {"psnr": "psnr_db", "bpp_ac": "bpp", "etime": "etime_s"}.get(field, field)
        rows.append((key, [results[p].report.to_dict()[key] for p in names]))
    if kind == "json":
        return json.dumps({p: results[p].report.to_dict() for p in names}) + "\n"
    if kind == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", *names])
        for key, values in rows:
            writer.writerow([key, *("" if v is None else v for v in values)])
        return buf.getvalue()
    if kind == "text":
        lines = [f"{'metric':<8}" + "".join(f"{p:>12}" for p in names)]
        for key, values in rows:
            cells = "".join(
                f"{'-' if v is None else v if isinstance(v, str) else f'{v:.4f}':>12}" for v in values
            )
            lines.append(f"{key:<8}{cells}")
        return "\n".join(lines) + "\n"
    raise FkzError(f"unknown report format {kind!r}")
