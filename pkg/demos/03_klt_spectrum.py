"""
Cross-block KLT and the eigenvalue spectrum
===========================================

Fit the Karhunen-Loeve basis to the block stack of a photograph, with and
without a whole-image DCT first, and compare how fast the spectra decay.
"""
from pathlib import Path

import numpy as np

from fctklt.codecio.pipeline import analyze
from fctklt.metrics import spectrum_metrics
from fctklt.raster import load_pgm
from fctklt.reduce import select_channels

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
img = load_pgm(DATA / "camera.pgm")

for pipeline in ("klt", "fct-klt"):
    a = analyze(img, pipeline, block_size=64)
    lam = a.eigenvalues
    norm = lam / lam[0]
    m95 = select_channels(lam, 0.95)
    metrics = spectrum_metrics(lam)
    print(f"--- {pipeline}")
    print("normalised spectrum, first 8:", np.round(norm[:8], 4))
    print(f"channels for 95% of variance: {m95} of {lam.size}")
    print("fgp {fgp:.2f}  frp {frp:.2f}  fp {fp:.2f}".format(**metrics))

    # the transformed channels are uncorrelated and carry the eigenvalues as variances
    y = a.coefficients.vectors()
    cov = np.cov(y, bias=True)
    off = np.abs(cov - np.diag(np.diag(cov))).max()
    print(f"largest off-diagonal covariance {off:.2e} (trace {np.trace(cov):.3e})")
