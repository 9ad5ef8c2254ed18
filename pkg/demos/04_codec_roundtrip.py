"""
Compress and decompress
=======================

Both pipelines at the default settings, a byte-level look at the
container, and the effect of the retained variance fraction.
"""
from pathlib import Path

from fctklt.codecio.container import CompressedContainer
from fctklt.codecio.pipeline import CodecConfig, analyze, compress, decompress, encode
from fctklt.metrics import report
from fctklt.raster import load_pgm

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
img = load_pgm(DATA / "moon.pgm")

for pipeline in ("klt", "fct-klt"):
    c = compress(img, CodecConfig(pipeline, block_size=64, keep_fraction=0.95, quant_bits=8))
    data = c.to_bytes()
    back = CompressedContainer.from_bytes(data)
    rec = decompress(back)
    r = report(img, rec, back)
    print(f"{pipeline:8s} m={c.m:2d}/{c.n}  {len(data):7d} bytes  CR {r.cr:7.2f}  PSNR {r.psnr:.2f} dB")

print("container header:", data[:29].hex(" "))

# more retained variance costs bytes and buys quality
analysis = analyze(img, "klt", 64)
for keep in (0.8, 0.9, 0.95, 0.99, 0.999):
    c = encode(analysis, CodecConfig("klt", block_size=64, keep_fraction=keep, quant_bits=8))
    r = report(img, decompress(c), c)
    print(f"keep {keep:5.3f}: m={c.m:2d}  CR {r.cr:5.2f}  PSNR {r.psnr:.2f} dB")

# a common quantiser step trades rate for distortion more smoothly
analysis = analyze(img, "fct-klt", 64)
for step in (32.0, 8.0, 2.0):
    cfg = CodecConfig("fct-klt", block_size=64, keep_fraction=1.0, quant_bits=16, step=step, channels=32)
    c = encode(analysis, cfg)
    r = report(img, decompress(c), c)
    print(f"step {step:4.1f}: {c.quant_bits:2d} bits  CR {r.cr:6.2f}  PSNR {r.psnr:.2f} dB")
