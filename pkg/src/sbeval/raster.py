"""Black-on-white rendering of a level and binary PGM encoding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Level

BLACK = 0
WHITE = 255


@dataclass(frozen=True, eq=False)
class Bitmap:
    """Bilevel image; ``pixels`` is a (height, width) uint8 array, row 0 at the top."""

    pixels: np.ndarray

    @property
    def width_px(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height_px(self) -> int:
        return int(self.pixels.shape[0])

    def __eq__(self, other):
        return isinstance(other, Bitmap) and np.array_equal(self.pixels, other.pixels)

    def black_count(self) -> int:
        return int(np.count_nonzero(self.pixels == BLACK))


def rasterize(level: Level, cell_px: int = 16, pad_cells: int = 1) -> Bitmap:
    if cell_px < 1 or pad_cells < 0:
        raise ValueError("cell_px must be >= 1 and pad_cells >= 0")
    cells = level.occupied_cells()
    if not cells:
        side = cell_px * (1 + 2 * pad_cells)
        return Bitmap(np.full((side, side), WHITE, dtype=np.uint8))

    min_c = min(c for c, _ in cells)
    max_c = max(c for c, _ in cells)
    min_r = min(r for _, r in cells)
    max_r = max(r for _, r in cells)
    w_cells = max_c - min_c + 1 + 2 * pad_cells
    h_cells = max_r - min_r + 1 + 2 * pad_cells

    grid = np.zeros((h_cells, w_cells), dtype=bool)
    for c, r in cells:
        # flip so that the lowest row lands at the bottom of the image
        grid[max_r + pad_cells - r, c - min_c + pad_cells] = True
    img = np.where(np.kron(grid, np.ones((cell_px, cell_px), dtype=bool)), BLACK, WHITE).astype(np.uint8)

    h, w = img.shape
    side = max(h, w)
    top = (side - h) // 2
    left = (side - w) // 2
    canvas = np.full((side, side), WHITE, dtype=np.uint8)
    canvas[top:top + h, left:left + w] = img
    return Bitmap(canvas)


def encode_pgm(bitmap: Bitmap) -> bytes:
    header = f"P5\n{bitmap.width_px} {bitmap.height_px}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(bitmap.pixels, dtype=np.uint8).tobytes()


def decode_pgm(data: bytes) -> Bitmap:
    """Inverse of :func:`encode_pgm` for the exact header layout it writes."""
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5":
        raise ValueError("not a binary PGM written by encode_pgm")
    width, height = (int(v) for v in parts[1].split())
    if parts[2] != b"255":
        raise ValueError(f"unsupported maxval {parts[2]!r}")
    body = parts[3]
    if len(body) != width * height:
        raise ValueError(f"expected {width * height} pixel bytes, found {len(body)}")
    return Bitmap(np.frombuffer(body, dtype=np.uint8).reshape(height, width).copy())
