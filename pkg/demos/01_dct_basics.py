"""
Orthonormal 2-D DCT
===================

The fast separable transform against the direct double sum, energy
preservation, and how a photograph's energy piles into low frequencies.
"""
from pathlib import Path

import numpy as np

from fctklt.dct2d import dct2_forward, dct2_inverse, dct2_reference, dct_matrix
from fctklt.raster import load_pgm

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
rng = np.random.default_rng(0)

# a ramp row: only the DC and odd-frequency terms survive
ramp = np.tile(np.arange(8.0) * 4, (8, 1))
print("ramp, first row of coefficients:")
print(np.round(dct2_forward(ramp)[0], 4))

# fast path vs the quadruple-loop oracle
x = rng.uniform(0, 255, size=(16, 16))
print("max |fast - direct| on 16x16:", np.abs(dct2_forward(x) - dct2_reference(x)).max())

# the basis matrix is orthonormal, so the transform keeps energy
c = dct_matrix(8)
print("max |C C^T - I|:", np.abs(c @ c.T - np.eye(8)).max())

img = load_pgm(DATA / "camera.pgm").to_float()
coeffs = dct2_forward(img)
print("energy ratio coeffs/pixels:", np.sum(coeffs**2) / np.sum(img**2))
print("round trip error:", np.abs(dct2_inverse(coeffs) - img).max())

# fraction of energy in the top-left corner of the spectrum
for k in (8, 32, 64, 128):
    share = np.sum(coeffs[:k, :k] ** 2) / np.sum(coeffs**2)
    print(f"lowest {k}x{k} frequencies hold {100 * share:.3f}% of the energy")
