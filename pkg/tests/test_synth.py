"""Synthetic-city generator: determinism and label consistency."""

import numpy as np
import pytest

from urbangrid.errors import DataError
from urbangrid.geolabel.grids import (building_density_grid,
                                      floor_area_ratio_grid, landuse_grid,
                                      population_grid)
from urbangrid.geolabel.synth import synthesize_city
from urbangrid.taxonomy import LabelKind


@pytest.fixture(scope="module")
def city():
    return synthesize_city(seed=4, rows=4, cols=4)


def test_minimum_size_enforced():
    with pytest.raises(DataError):
        synthesize_city(seed=0, rows=3, cols=4)


def test_deterministic_in_seed(city):
    again = synthesize_city(seed=4, rows=4, cols=4)
    assert np.array_equal(again.raster.pixels, city.raster.pixels)
    assert np.array_equal(again.land.values, city.land.values)
    assert np.array_equal(again.pop.values, city.pop.values)
    other = synthesize_city(seed=5, rows=4, cols=4)
    assert not np.array_equal(other.raster.pixels, city.raster.pixels)


def test_raster_geometry(city):
    assert city.raster.pixels.shape == (800, 800, 3)
    assert city.raster.pixels.dtype == np.uint8
    assert city.raster.pixel_size == 1.2
    assert city.grid.shape == (4, 4)
    assert city.grid.cell_size == 240.0


def test_truth_grids_fully_labelled(city):
    for lg in (city.land, city.bd, city.far, city.pop):
        assert lg.mask.all()
    assert city.land.kind == LabelKind.LAND
    assert city.bd.kind == LabelKind.BD


def test_pipeline_reproduces_generator_truth(city):
    """Running the label pipeline on the synthetic features must give back
    the generator's own truth grids (this is the point of the generator)."""
    land = landuse_grid(city.zones, city.grid)
    assert np.array_equal(land.values, city.land.values)
    bd = building_density_grid(city.buildings, city.grid)
    np.testing.assert_allclose(bd.values, city.bd.values, atol=1e-9)
    far = floor_area_ratio_grid(city.buildings, city.grid)
    np.testing.assert_allclose(far.values, city.far.values, atol=1e-9)
    pop = population_grid(city.blocks, city.grid)
    assert pop.mask.all()
    np.testing.assert_allclose(pop.values, city.pop.values, atol=1e-9)


def test_population_mass_matches_blocks(city):
    total_blocks = sum(b.population for b in city.blocks)
    assert city.pop.values.sum() == pytest.approx(total_blocks, rel=1e-12)


def test_all_13_classes_present_at_8x8():
    big = synthesize_city(seed=0, rows=8, cols=8)
    assert set(np.unique(big.land.values)) == set(range(13))
    # 64 cells over 13 classes: every class occurs 4 or 5 times.
    counts = np.bincount(big.land.values.ravel(), minlength=13)
    assert counts.min() >= 4 and counts.max() <= 5


def test_features_concatenates_everything(city):
    feats = city.features()
    assert len(feats) == len(city.buildings) + len(city.blocks) + len(city.zones)
    assert len(city.zones) == 16
    assert len(city.blocks) == 16


def test_built_classes_have_buildings(city):
    built_cells = np.isin(city.land.values, (0, 5, 6, 7, 8, 10))
    assert (city.bd.values > 0).sum() == built_cells.sum()
    assert np.array_equal(city.bd.values > 0, built_cells)
    # Unbuilt cells carry zero density and zero population.
    assert np.all(city.pop.values[~built_cells] == 0.0)
    assert np.all(city.far.values[~built_cells] == 0.0)
