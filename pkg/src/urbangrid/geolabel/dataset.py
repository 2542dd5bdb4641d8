"""Training-sample assembly: one sample per (unmasked cell, label kind)."""

import numpy as np

from ..errors import DataError
from ..net.config import TILE_PIXELS, Sample
from ..taxonomy import LabelKind
from .discretize import discretize, spec_for

_ALIGN_TOL = 1e-6


def cell_pixel_origin(raster, grid):
    """Pixel (row0, col0) of grid cell (0, 0); rejects misalignment."""
    ps = raster.pixel_size
    per_cell = grid.cell_size / ps
    if abs(per_cell - TILE_PIXELS) > _ALIGN_TOL:
        raise DataError(
            f"cell size {grid.cell_size} m is {per_cell:.6f} pixels at "
            f"{ps} m/px; tiles must be {TILE_PIXELS} pixels")
    col0 = (grid.origin[0] - raster.origin[0]) / ps
    row0 = (grid.origin[1] - raster.origin[1]) / ps
    if abs(col0 - round(col0)) > _ALIGN_TOL or abs(row0 - round(row0)) > _ALIGN_TOL:
        raise DataError(
            f"grid origin {grid.origin} not on a pixel boundary of the raster")
    return int(round(row0)), int(round(col0))


def assemble_dataset(raster, grids, seed=0, specs=None):
    """Build shuffled Samples from a raster and its label grids.

    For every unmasked cell of every grid, emits one Sample whose tile is
    the cell's 200x200 pixel window (float64) and whose label is the land
    class index or the discretized level.  Grids must share one GridSpec,
    and the raster must cover all unmasked cells.  `specs` may override
    the default discretization per label kind.
    """
    specs = specs or {}
    if not grids:
        raise DataError("assemble_dataset needs at least one label grid")
    spec = grids[0].grid
    for g in grids[1:]:
        if g.grid != spec:
            raise DataError("label grids use different grid specs")
    kinds = [g.kind for g in grids]
    if len(set(kinds)) != len(kinds):
        raise DataError(f"duplicate label kinds: {[k.value for k in kinds]}")
    row0, col0 = cell_pixel_origin(raster, spec)

    tiles = {}

    def tile_for(i, j):
        if (i, j) not in tiles:
            r = row0 + i * TILE_PIXELS
            c = col0 + j * TILE_PIXELS
            if r < 0 or c < 0 or r + TILE_PIXELS > raster.height \
                    or c + TILE_PIXELS > raster.width:
                raise DataError(
                    f"cell ({i}, {j}) falls outside the raster extent")
            tiles[(i, j)] = np.ascontiguousarray(
                raster.window(r, c, TILE_PIXELS, TILE_PIXELS), dtype=np.float64)
        return tiles[(i, j)]

    samples = []
    for i in range(spec.rows):
        for j in range(spec.cols):
            for g in grids:
                if not g.mask[i, j]:
                    continue
                if g.kind == LabelKind.LAND:
                    label = int(g.values[i, j])
                else:
                    dspec = specs.get(g.kind) or spec_for(g.kind)
                    label = discretize(float(g.values[i, j]), dspec)
                samples.append(Sample(tile=tile_for(i, j), label_type=g.kind,
                                      label=label, cell=(i, j)))
    order = np.random.default_rng(seed).permutation(len(samples))
    return [samples[k] for k in order]
