"""Deterministic synthetic city generator for end-to-end experiments.

Each 240 m cell gets one of the 13 land-use classes (every class appears
before any repeats).  Built classes place a small grid of identical
square buildings sized to hit a class-specific building density, jittered
by at most +-0.01 per cell; floors are fixed per class, and the block
population is a fixed linear function of the achieved density with a
class-specific intercept.  All target values sit at discretization-bin
midpoints and the jitter stays well inside one bin, so the discretized
labels are exact by construction.

Bookkeeping uses the same shoelace areas as the clipping pipeline, so
the returned truth grids agree with the *_grid builders to float64
rounding.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from ..mapper.raster import RasterImage
from ..taxonomy import LabelKind
from .geometry import ring_area
from .grids import GridSpec, LabelGrid
from .vectors import FeatureKind, PolygonFeature

PIXEL_SIZE = 1.2
CELL_SIZE = 240.0
CELL_PIXELS = 200

# Per-class building plan: density target, floors, building count.
# Density targets are BD-bin midpoints (width 0.04) and the implied FAR
# and population land at least a quarter bin from any bin edge.
_PLAN = {
    0: (0.30, 8, 4),    # Commercial
    5: (0.22, 2, 2),    # Industrial
    6: (0.10, 2, 6),    # Residential one
    7: (0.26, 4, 8),    # Residential two
    8: (0.34, 3, 9),    # Residential three
    10: (0.18, 4, 3),   # Administration and public services
}

# Population intercepts (persons per cell), all POP-bin midpoints
# (width 187.5); population = intercept + 1000 * (BD - BD target).
_POP_TARGET = {
    0: 3093.75,
    5: 468.75,
    6: 1031.25,
    7: 2156.25,
    8: 2906.25,
    10: 843.75,
}

_JITTER = 0.01

# Mean surface colour per class; far enough apart that land use is
# recoverable from appearance.
_BASE_COLOR = np.array([
    (200, 60, 60),     # Commercial
    (40, 80, 180),     # Water area - river and lake
    (190, 190, 90),    # Agriculture
    (60, 160, 70),     # Green space and square
    (130, 70, 160),    # Regional transport facilities
    (150, 100, 60),    # Industrial
    (230, 200, 170),   # Residential one
    (235, 160, 95),    # Residential two
    (200, 90, 40),     # Residential three
    (110, 110, 110),   # Road, street and transportation
    (220, 120, 180),   # Administration and public services
    (130, 190, 220),   # Water area - pond
    (180, 180, 180),   # Others
], dtype=np.int16)

_NOISE = 6  # uniform per-pixel colour noise, +- this many levels


@dataclass
class SynthCity:
    """Generator output: imagery, vector features, and exact truth."""

    raster: RasterImage
    buildings: list
    blocks: list
    zones: list
    land: LabelGrid
    bd: LabelGrid
    far: LabelGrid
    pop: LabelGrid

    @property
    def grid(self):
        return self.land.grid

    def features(self):
        return self.buildings + self.blocks + self.zones


def _cell_rect(x0, y0, x1, y1):
    return np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)],
                    dtype=np.float64)


def synthesize_city(seed, rows, cols):
    """Generate a rows x cols cell city; deterministic in `seed`."""
    if rows < 4 or cols < 4:
        raise DataError(f"city needs at least 4x4 cells, got {rows}x{cols}")
    rng = np.random.default_rng(seed)
    n_cells = rows * cols
    classes = rng.permutation(np.arange(n_cells) % 13).reshape(rows, cols)

    grid = GridSpec(origin=(0.0, 0.0), rows=rows, cols=cols, cell_size=CELL_SIZE)
    image = np.empty((rows * CELL_PIXELS, cols * CELL_PIXELS, 3), dtype=np.int16)

    buildings, blocks, zones = [], [], []
    bd_truth = np.zeros((rows, cols))
    far_truth = np.zeros((rows, cols))
    pop_truth = np.zeros((rows, cols))

    for i in range(rows):
        for j in range(cols):
            cls = int(classes[i, j])
            x0, y0, x1, y1 = grid.cell_bounds(i, j)
            r0, c0 = i * CELL_PIXELS, j * CELL_PIXELS
            image[r0:r0 + CELL_PIXELS, c0:c0 + CELL_PIXELS, :] = _BASE_COLOR[cls]

            zones.append(PolygonFeature(ring=_cell_rect(x0, y0, x1, y1),
                                        kind=FeatureKind.LANDUSE, class_code=cls))

            cell_area = 0.0
            cell_floor_area = 0.0
            if cls in _PLAN:
                target, floors, count = _PLAN[cls]
                density = target + rng.uniform(-_JITTER, _JITTER)
                g = int(np.ceil(np.sqrt(count)))
                pitch = CELL_SIZE / g
                side = float(np.sqrt(density * CELL_SIZE ** 2 / count))
                roof = 35 + 20 * floors
                for k in range(count):
                    bx = x0 + (k % g) * pitch + (pitch - side) / 2.0
                    by = y0 + (k // g) * pitch + (pitch - side) / 2.0
                    ring = _cell_rect(bx, by, bx + side, by + side)
                    buildings.append(PolygonFeature(
                        ring=ring, kind=FeatureKind.BUILDING, floors=floors))
                    a = ring_area(ring)
                    cell_area += a
                    cell_floor_area += a * floors
                    pr0 = int(round(by / PIXEL_SIZE))
                    pr1 = int(round((by + side) / PIXEL_SIZE))
                    pc0 = int(round(bx / PIXEL_SIZE))
                    pc1 = int(round((bx + side) / PIXEL_SIZE))
                    image[pr0:pr1, pc0:pc1, :] = roof

                bd = cell_area / CELL_SIZE ** 2
                pop = _POP_TARGET[cls] + 1000.0 * (bd - target)
            else:
                bd = 0.0
                pop = 0.0
            bd_truth[i, j] = bd
            far_truth[i, j] = cell_floor_area / CELL_SIZE ** 2
            pop_truth[i, j] = pop
            blocks.append(PolygonFeature(ring=_cell_rect(x0, y0, x1, y1),
                                         kind=FeatureKind.BLOCK, population=pop))

    noise = rng.integers(-_NOISE, _NOISE + 1, size=image.shape, dtype=np.int16)
    pixels = np.clip(image + noise, 0, 255).astype(np.uint8)
    raster = RasterImage(pixels, origin=(0.0, 0.0), pixel_size=PIXEL_SIZE)

    return SynthCity(
        raster=raster,
        buildings=buildings,
        blocks=blocks,
        zones=zones,
        land=LabelGrid(grid, classes.astype(np.int64), LabelKind.LAND),
        bd=LabelGrid(grid, bd_truth, LabelKind.BD),
        far=LabelGrid(grid, far_truth, LabelKind.FAR),
        pop=LabelGrid(grid, pop_truth, LabelKind.POP),
    )
