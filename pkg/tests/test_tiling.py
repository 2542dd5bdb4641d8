"""Raster-to-cell tiling and grid derivation."""

from types import SimpleNamespace

import numpy as np
import pytest

from urbangrid.errors import DataError
from urbangrid.geolabel.grids import GridSpec
from urbangrid.mapper.raster import RasterImage
from urbangrid.mapper.tiling import grid_for_raster, tile_raster


def _raster(h, w, seed=0):
    rng = np.random.default_rng(seed)
    pix = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    return RasterImage(pix, origin=(1200.0, 2400.0), pixel_size=1.2)


def test_grid_for_raster_exact_fit():
    grid = grid_for_raster(_raster(400, 600))
    assert grid.shape == (2, 3)
    assert grid.origin == (1200.0, 2400.0)
    assert grid.cell_size == 240.0


def test_grid_for_raster_drops_border_remainder():
    grid = grid_for_raster(_raster(450, 430))
    assert grid.shape == (2, 2)


def test_grid_for_raster_large_scene_arithmetic():
    # City-scale raster: 47537 x 38100 px at 1.2 m/px -> 237 x 190 cells.
    fake = SimpleNamespace(height=47537, width=38100, pixel_size=1.2,
                           origin=(0.0, 0.0))
    grid = grid_for_raster(fake)
    assert grid.shape == (237, 190)
    assert grid.rows * grid.cols == 45030


def test_grid_for_raster_rejects_non_integer_cells():
    with pytest.raises(DataError):
        grid_for_raster(_raster(400, 400), cell_size=250.0)


def test_tiles_are_views_in_row_major_order():
    r = _raster(400, 600)
    grid = grid_for_raster(r)
    tiles = list(tile_raster(r, grid))
    assert [ij for ij, _ in tiles] == [(0, 0), (0, 1), (0, 2),
                                       (1, 0), (1, 1), (1, 2)]
    for (i, j), tile in tiles:
        assert tile.shape == (200, 200, 3)
        assert np.shares_memory(tile, r.pixels)
        assert np.array_equal(tile, r.pixels[i * 200:(i + 1) * 200,
                                             j * 200:(j + 1) * 200, :])


def test_tile_raster_with_offset_grid():
    r = _raster(600, 600)
    # Grid anchored one cell in from the raster origin.
    grid = GridSpec(origin=(1200.0 + 240.0, 2400.0 + 240.0), rows=1, cols=1)
    ((ij, tile),) = list(tile_raster(r, grid))
    assert ij == (0, 0)
    assert np.array_equal(tile, r.pixels[200:400, 200:400, :])


def test_tile_raster_rejects_misaligned_origin():
    r = _raster(400, 400)
    grid = GridSpec(origin=(1200.6, 2400.0), rows=1, cols=1)  # half pixel off
    with pytest.raises(DataError):
        list(tile_raster(r, grid))


def test_tile_raster_rejects_wrong_cell_size():
    r = _raster(400, 400)
    grid = GridSpec(origin=(1200.0, 2400.0), rows=1, cols=1, cell_size=120.0)
    with pytest.raises(DataError):
        list(tile_raster(r, grid))


def test_tile_raster_rejects_uncovered_grid():
    r = _raster(400, 400)
    grid = GridSpec(origin=(1200.0, 2400.0), rows=3, cols=1)
    with pytest.raises(DataError):
        list(tile_raster(r, grid))
