"""Per-cell map products: inference over tiles and product file I/O.

A product directory holds one CSV per layer (land, bd, far, pop in the
grid-CSV format), a gridspec.csv sidecar so products round-trip without
out-of-band knowledge, and a flat-colour PPM of the land map using the
fixed palette.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from ..geolabel.discretize import dediscretize, spec_for
from ..geolabel.grids import (
    LabelGrid,
    read_grid_csv,
    read_gridspec_csv,
    write_grid_csv,
    write_gridspec_csv,
)
from ..net.model import forward
from ..taxonomy import HEAD_WIDTHS, LabelKind
from .raster import colorize_land, write_ppm
from .tiling import grid_for_raster, tile_raster

_LAYER_FILES = {LabelKind.LAND: "land.csv", LabelKind.BD: "bd.csv",
                LabelKind.FAR: "far.csv", LabelKind.POP: "pop.csv"}
_GRIDSPEC_FILE = "gridspec.csv"
_LAND_PPM = "land_color.ppm"


@dataclass
class MapProduct:
    """The four derived grids, plus optional per-cell head distributions."""

    land: LabelGrid
    bd: LabelGrid
    far: LabelGrid
    pop: LabelGrid
    distributions: dict = field(default_factory=dict)

    def __post_init__(self):
        layers = self.layers()
        spec = layers[0].grid
        for g in layers[1:]:
            if g.grid != spec:
                raise DataError("product layers use different grid specs")
        expect = (LabelKind.LAND, LabelKind.BD, LabelKind.FAR, LabelKind.POP)
        for g, kind in zip(layers, expect):
            if g.kind != kind:
                raise DataError(f"layer kind {g.kind.value} where {kind.value} expected")

    def layers(self):
        return [self.land, self.bd, self.far, self.pop]

    @property
    def grid(self):
        return self.land.grid


def _decode(probs, kind, expected_value, spec=None):
    """Point value from one head's 1x1xK distribution."""
    p = probs[0, 0]
    if kind == LabelKind.LAND:
        return int(np.argmax(p))
    spec = spec or spec_for(kind)
    if spec.levels != len(p):
        raise DataError(f"{kind.value} head emits {len(p)} levels but the "
                        f"discretization spec has {spec.levels}")
    if expected_value:
        mids = spec.lower + (np.arange(spec.levels) + 0.5) * spec.width
        return float(p @ mids)
    return dediscretize(int(np.argmax(p)), spec)


def predict_products(net, raster, grid=None, expected_value=False,
                     keep_distributions=False, specs=None):
    """Run the network over every cell tile and decode the four layers.

    Point decoding is argmax + bin midpoint; pass expected_value=True for
    probability-weighted midpoints instead.  The network must carry the
    normalization statistics of its training run.  `specs` may override
    the default per-kind discretization used for decoding.
    """
    specs = specs or {}
    if not net.has_norm_stats():
        raise DataError("checkpoint lacks normalization statistics; "
                        "run inference with a trained network")
    if grid is None:
        grid = grid_for_raster(raster)
    shape = grid.shape
    land = np.zeros(shape, dtype=np.int64)
    values = {LabelKind.BD: np.zeros(shape), LabelKind.FAR: np.zeros(shape),
              LabelKind.POP: np.zeros(shape)}
    dists = {}
    if keep_distributions:
        for kind in (LabelKind.LAND, LabelKind.BD, LabelKind.FAR, LabelKind.POP):
            dists[kind] = np.zeros(shape + (HEAD_WIDTHS[kind],))
    for (i, j), tile in tile_raster(raster, grid):
        heads, _ = forward(net, np.ascontiguousarray(tile, dtype=np.float64))
        for kind in (LabelKind.LAND, LabelKind.BD, LabelKind.FAR, LabelKind.POP):
            probs = heads.get(kind)
            if kind == LabelKind.LAND:
                land[i, j] = _decode(probs, kind, expected_value)
            else:
                values[kind][i, j] = _decode(probs, kind, expected_value,
                                             specs.get(kind))
            if keep_distributions:
                dists[kind][i, j] = probs[0, 0]
    return MapProduct(
        land=LabelGrid(grid, land, LabelKind.LAND),
        bd=LabelGrid(grid, values[LabelKind.BD], LabelKind.BD),
        far=LabelGrid(grid, values[LabelKind.FAR], LabelKind.FAR),
        pop=LabelGrid(grid, values[LabelKind.POP], LabelKind.POP),
        distributions=dists,
    )


def write_products(product, directory):
    """Write all product files; on failure, remove whatever was written."""
    os.makedirs(directory, exist_ok=True)
    written = []
    try:
        path = os.path.join(directory, _GRIDSPEC_FILE)
        write_gridspec_csv(path, product.grid)
        written.append(path)
        for layer in product.layers():
            path = os.path.join(directory, _LAYER_FILES[layer.kind])
            write_grid_csv(path, layer)
            written.append(path)
        path = os.path.join(directory, _LAND_PPM)
        write_ppm(path, colorize_land(product.land.values, product.land.mask))
        written.append(path)
    except Exception:
        for path in written:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise
    return written


def read_products(directory):
    """Read a product directory back (distributions are not persisted)."""
    spec = read_gridspec_csv(os.path.join(directory, _GRIDSPEC_FILE))
    layers = {}
    for kind, name in _LAYER_FILES.items():
        layers[kind] = read_grid_csv(os.path.join(directory, name), spec, kind)
    return MapProduct(land=layers[LabelKind.LAND], bd=layers[LabelKind.BD],
                      far=layers[LabelKind.FAR], pop=layers[LabelKind.POP])
