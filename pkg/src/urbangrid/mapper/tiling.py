"""Cutting a raster into non-overlapping 200x200 cell tiles."""

from ..errors import DataError
from ..geolabel.dataset import TILE_PIXELS, cell_pixel_origin
from ..geolabel.grids import GridSpec


def grid_for_raster(raster, cell_size=240.0):
    """Largest grid of full cells anchored at the raster origin.

    Border pixels beyond the last full cell are left out (callers mask
    them implicitly: they belong to no cell).
    """
    per_cell = cell_size / raster.pixel_size
    if abs(per_cell - round(per_cell)) > 1e-6 or round(per_cell) < 1:
        raise DataError(
            f"cell size {cell_size} m is not an integer number of pixels "
            f"at {raster.pixel_size} m/px")
    per_cell = int(round(per_cell))
    rows = raster.height // per_cell
    cols = raster.width // per_cell
    if rows < 1 or cols < 1:
        raise DataError(
            f"raster {raster.height}x{raster.width} holds no full "
            f"{per_cell}-pixel cell")
    return GridSpec(origin=raster.origin, rows=rows, cols=cols,
                    cell_size=cell_size)


def tile_raster(raster, grid):
    """Yield ((i, j), 200x200 tile view) in row-major cell order.

    The grid must be pixel-aligned to the raster and fully covered by it;
    tiles are disjoint views into the raster (no copies).
    """
    row0, col0 = cell_pixel_origin(raster, grid)
    if row0 < 0 or col0 < 0 \
            or row0 + grid.rows * TILE_PIXELS > raster.height \
            or col0 + grid.cols * TILE_PIXELS > raster.width:
        raise DataError(
            f"grid {grid.rows}x{grid.cols} cells at pixel ({row0}, {col0}) "
            f"exceeds raster {raster.height}x{raster.width}")
    for i in range(grid.rows):
        for j in range(grid.cols):
            r = row0 + i * TILE_PIXELS
            c = col0 + j * TILE_PIXELS
            yield (i, j), raster.pixels[r:r + TILE_PIXELS, c:c + TILE_PIXELS, :]
