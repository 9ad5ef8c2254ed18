"""``fkz`` command line: compress, decompress, metrics, analyze, bench.

Exit status is 0 on success, 1 on a codec or I/O error and 2 on a usage
error. ``FKZ_BLOCK``, ``FKZ_KEEP`` and ``FKZ_BITS`` override the built-in
defaults; explicit flags override both.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

from .bench import bench, format_table
from .codecio.container import read_container, write_container
from .codecio.pipeline import CodecConfig, analyze, compress, decompress
from .errors import FkzError
from .metrics import report, spectrum_metrics
from .raster import format_pgm, load_pgm, parse_pgm, save_pgm

DEFAULTS = {"block": 64, "keep": 0.95, "bits": 8}


def _env_default(name: str, kind):
    raw = os.environ.get(f"FKZ_{name.upper()}")
    if raw is None:
        return DEFAULTS[name]
    try:
        return kind(raw)
    except ValueError:
        raise SystemExit(f"fkz: error: invalid FKZ_{name.upper()}={raw!r}") from None


def _read_image(path: str):
    if path == "-":
        return parse_pgm(sys.stdin.buffer.read())
    return load_pgm(path)


def _write_image(img, path: str):
    if path == "-":
        sys.stdout.buffer.write(format_pgm(img))
        sys.stdout.buffer.flush()
    else:
        save_pgm(img, path)


def _add_transform_flags(p: argparse.ArgumentParser, with_rate: bool = True):
    p.add_argument("--pipeline", choices=["klt", "fct-klt"], default="fct-klt")
    p.add_argument("--block", type=int, default=_env_default("block", int), help="sub-block size B")
    p.add_argument("--pad", action="store_true", help="reflect-pad to a multiple of the block size")
    if with_rate:
        p.add_argument("--keep", type=float, default=_env_default("keep", float), help="retained variance fraction")
        p.add_argument("--bits", type=int, default=_env_default("bits", int), help="quantiser bits (1-16)")
        p.add_argument("--step", type=float, default=None, help="common quantiser step; --bits becomes a cap")
        p.add_argument("--channels", type=int, default=None, help="retain exactly this many channels")


def _add_format(p: argparse.ArgumentParser, default: str = "json"):
    p.add_argument("--format", choices=["json", "csv", "text"], default=default)


def cmd_compress(args) -> int:
    img = _read_image(args.input)
    config = CodecConfig(
        pipeline=args.pipeline,
        block_size=args.block,
        keep_fraction=args.keep,
        quant_bits=args.bits,
        pad=args.pad,
        step=args.step,
        channels=args.channels,
    )
    container = compress(img, config)
    write_container(container, args.output)
    size = len(container)
    ratio = img.rows * img.cols / size
    print(
        f"{args.pipeline}: CR {ratio:.4f}  bpp {8 / ratio:.4f}  channels {container.m}/{container.n}  "
        f"bits {container.quant_bits}  {size} bytes",
        file=sys.stderr,
    )
    return 0


def cmd_decompress(args) -> int:
    container = read_container(args.input)
    _write_image(decompress(container), args.output)
    return 0


def cmd_metrics(args) -> int:
    original = _read_image(args.original)
    reconstructed = load_pgm(args.reconstructed)
    container = read_container(args.container) if args.container else None
    sys.stdout.write(report(original, reconstructed, container).format(args.format))
    return 0


def cmd_analyze(args) -> int:
    img = _read_image(args.image)
    analysis = analyze(img, args.pipeline, args.block, args.pad)
    lam = analysis.eigenvalues
    top = float(lam[0])
    normalized = [float(v / top) if top > 0 else 0.0 for v in lam]
    spectral = spectrum_metrics(lam)
    if args.format == "json":
        out = {"pipeline": args.pipeline, "n": int(lam.size), "eigenvalues": lam.tolist(), "normalized": normalized, **spectral}
        sys.stdout.write(json.dumps(out) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rank", "eigenvalue", "normalized"])
        for i, (v, r) in enumerate(zip(lam.tolist(), normalized), start=1):
            writer.writerow([i, repr(v), repr(r)])
        sys.stdout.write(buf.getvalue())
        shown = "  ".join(f"{k} {'-' if v is None else f'{v:.4f}'}" for k, v in spectral.items())
        print(f"{args.pipeline}: {shown}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    img = _read_image(args.image)
    start = time.perf_counter()
    results = bench(img, block_size=args.block, target_cr=args.target_cr)
    sys.stdout.write(format_table(results, args.format))
    for name, r in results.items():
        print(
            f"{name}: channels {r.container.m}/{r.container.n}  step {r.config.step:.4g}  "
            f"bits {r.container.quant_bits}  {len(r.container)} bytes",
            file=sys.stderr,
        )
    print(f"bench finished in {time.perf_counter() - start:.1f} s", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fkz", description="KLT and FCT+KLT lossy grayscale image codec")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="PGM -> .fkz container")
    _add_transform_flags(p)
    p.add_argument("input", help="input PGM ('-' for stdin)")
    p.add_argument("output", help="output container ('-' for stdout)")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help=".fkz container -> PGM")
    p.add_argument("input", help="input container ('-' for stdin)")
    p.add_argument("output", help="output PGM ('-' for stdout)")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("metrics", help="compare an original and a reconstruction")
    p.add_argument("original")
    p.add_argument("reconstructed")
    p.add_argument("container", nargs="?", default=None, help="container for rate and spectrum metrics")
    _add_format(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("analyze", help="eigenvalue spectrum of the cross-block covariance")
    _add_transform_flags(p, with_rate=False)
    p.add_argument("image")
    _add_format(p, default="csv")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="KLT vs FCT+KLT at matched container size")
    p.add_argument("image")
    p.add_argument("--block", type=int, default=_env_default("block", int))
    p.add_argument("--target-cr", type=float, default=4.0)
    _add_format(p, default="csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FkzError, OSError) as exc:
        print(f"fkz: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
