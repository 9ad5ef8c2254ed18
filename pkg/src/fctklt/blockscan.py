"""Sub-block tiling in zig-zag order over the block grid.

A plane of shape (grid_rows*B, grid_cols*B) is cut into B x B tiles; the
tiles are visited in JPEG zig-zag order over the grid and stacked so that
stack index 0 is the first tile visited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = [
    "SubBlockStack",
    "zigzag_order",
    "tile_to_stack",
    "stack_to_plane",
    "padded_shape",
    "reflect_pad",
]


@dataclass(frozen=True)
class SubBlockStack:
    """``n`` real-valued B x B blocks, ``blocks[k]`` being grid cell ``zigzag_order[k]``.

    After a KLT the blocks are eigen-channels; ``channels`` may then be
    smaller than ``grid_rows * grid_cols`` (pruned stack).
    """

    blocks: np.ndarray
    grid_rows: int
    grid_cols: int

    def __post_init__(self):
        blocks = np.asarray(self.blocks, dtype=np.float64)
        if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2] or blocks.shape[1] < 1:
            raise DimensionError(f"blocks must have shape (n, B, B), got {blocks.shape}")
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise DimensionError("grid dimensions must be positive")
        if blocks.shape[0] > self.grid_rows * self.grid_cols:
            raise DimensionError(
                f"{blocks.shape[0]} blocks exceed grid {self.grid_rows}x{self.grid_cols}"
            )
        object.__setattr__(self, "blocks", blocks)

    @property
    def block_size(self) -> int:
        return self.blocks.shape[1]

    @property
    def n(self) -> int:
        return self.grid_rows * self.grid_cols

    @property
    def channels(self) -> int:
        return self.blocks.shape[0]

    def vectors(self) -> np.ndarray:
        """Samples as a (channels, B*B) matrix; column p is the vector at pixel position p."""
        return self.blocks.reshape(self.channels, -1)

    def with_vectors(self, vectors: np.ndarray) -> "SubBlockStack":
        b = self.block_size
        vectors = np.asarray(vectors, dtype=np.float64)
        return SubBlockStack(vectors.reshape(vectors.shape[0], b, b), self.grid_rows, self.grid_cols)


def zigzag_order(grid_rows: int, grid_cols: int) -> list[tuple[int, int]]:
    """JPEG zig-zag traversal of a grid_rows x grid_cols grid.

    Starts at (0, 0), steps right to (0, 1), then walks anti-diagonals in
    alternating direction.
    """
    if grid_rows < 1 or grid_cols < 1:
        raise DimensionError("grid dimensions must be >= 1")
    order = []
    for s in range(grid_rows + grid_cols - 1):
        lo = max(0, s - grid_cols + 1)
        hi = min(s, grid_rows - 1)
        rows = range(lo, hi + 1)
        if s % 2 == 0:
            # even diagonals run bottom-left to top-right
            rows = reversed(rows)
        order.extend((r, s - r) for r in rows)
    return order


def padded_shape(rows: int, cols: int, block_size: int) -> tuple[int, int]:
    return (-(-rows // block_size) * block_size, -(-cols // block_size) * block_size)


def reflect_pad(plane: np.ndarray, block_size: int) -> np.ndarray:
    """Pad bottom/right edges by mirror reflection up to a multiple of ``block_size``."""
    plane = np.asarray(plane)
    rows, cols = plane.shape
    prow, pcol = padded_shape(rows, cols, block_size)
    if (prow, pcol) == (rows, cols):
        return plane
    return np.pad(plane, ((0, prow - rows), (0, pcol - cols)), mode="symmetric")


def tile_to_stack(plane, block_size: int) -> SubBlockStack:
    """Cut ``plane`` into B x B tiles and stack them in zig-zag grid order."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise DimensionError(f"expected a 2-D plane, got shape {plane.shape}")
    if block_size < 1:
        raise DimensionError(f"block size must be >= 1, got {block_size}")
    rows, cols = plane.shape
    if rows % block_size or cols % block_size:
        prow, pcol = padded_shape(rows, cols, block_size)
        raise DimensionError(
            f"{rows}x{cols} plane is not divisible by block size {block_size}; "
            f"pad by {prow - rows} rows and {pcol - cols} columns (to {prow}x{pcol})"
        )
    gr, gc = rows // block_size, cols // block_size
    tiles = plane.reshape(gr, block_size, gc, block_size).swapaxes(1, 2)
    order = zigzag_order(gr, gc)
    idx_r = np.fromiter((r for r, _ in order), dtype=np.intp, count=len(order))
    idx_c = np.fromiter((c for _, c in order), dtype=np.intp, count=len(order))
    return SubBlockStack(tiles[idx_r, idx_c].copy(), gr, gc)


def stack_to_plane(stack: SubBlockStack) -> np.ndarray:
    """Inverse of :func:`tile_to_stack`."""
    if stack.channels != stack.n:
        raise DimensionError(f"stack holds {stack.channels} of {stack.n} blocks; zero-pad first")
    b = stack.block_size
    gr, gc = stack.grid_rows, stack.grid_cols
    tiles = np.empty((gr, gc, b, b))
    for k, (r, c) in enumerate(zigzag_order(gr, gc)):
        tiles[r, c] = stack.blocks[k]
    return tiles.swapaxes(1, 2).reshape(gr * b, gc * b)
