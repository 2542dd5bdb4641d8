"""Label generation from vector data: geometry, grids, discretization."""

from .geometry import clip_polygon_area, clip_ring, ring_area
from .discretize import (
    BD_SPEC,
    FAR_SPEC,
    POP_SPEC,
    DiscretizationSpec,
    dediscretize,
    discretize,
    spec_for,
)
from .vectors import FeatureKind, PolygonFeature, read_features, write_features
from .grids import (
    GridSpec,
    LabelGrid,
    building_density_grid,
    floor_area_ratio_grid,
    landuse_grid,
    population_grid,
    read_grid_csv,
    read_gridspec_csv,
    write_grid_csv,
    write_gridspec_csv,
)
from .dataset import assemble_dataset
from .synth import SynthCity, synthesize_city

__all__ = [
    "clip_polygon_area",
    "clip_ring",
    "ring_area",
    "BD_SPEC",
    "FAR_SPEC",
    "POP_SPEC",
    "DiscretizationSpec",
    "dediscretize",
    "discretize",
    "spec_for",
    "FeatureKind",
    "PolygonFeature",
    "read_features",
    "write_features",
    "GridSpec",
    "LabelGrid",
    "building_density_grid",
    "floor_area_ratio_grid",
    "landuse_grid",
    "population_grid",
    "read_grid_csv",
    "read_gridspec_csv",
    "write_grid_csv",
    "write_gridspec_csv",
    "assemble_dataset",
    "SynthCity",
    "synthesize_city",
]
