"""
Zig-zag block stacking
======================

Cutting a plane into B x B blocks, ordering them along anti-diagonals and
reading one sample vector per pixel position across the stack.
"""
import numpy as np

from fctklt.blockscan import reflect_pad, stack_to_plane, tile_to_stack, zigzag_order
from fctklt.errors import DimensionError

# the scan over a 4x4 grid of blocks, shown as visit order per cell
order = zigzag_order(4, 4)
grid = np.zeros((4, 4), dtype=int)
for k, (r, c) in enumerate(order):
    grid[r, c] = k
print("visit order on a 4x4 block grid:")
print(grid)

# an 8x8 plane cut into 2x2 blocks gives a 16-channel stack
plane = np.arange(64.0).reshape(8, 8)
stack = tile_to_stack(plane, 2)
print("stack shape (n, B, B):", stack.blocks.shape)
print("third block in scan order:\n", stack.blocks[2])

# each pixel position across the stack is one n-dimensional sample
vectors = stack.vectors()
print("sample vectors:", vectors.shape[1], "of length", vectors.shape[0])
print("vector at position (0, 0):", vectors[:, 0])

assert np.array_equal(stack_to_plane(stack), plane)
print("tile/stack round trip is exact")

# sizes that do not divide need padding first
try:
    tile_to_stack(np.zeros((10, 10)), 4)
except DimensionError as exc:
    print("error:", exc)
padded = reflect_pad(np.arange(100.0).reshape(10, 10), 4)
print("after mirror padding:", padded.shape)
