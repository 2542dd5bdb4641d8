"""Label grids on the 240 m cell lattice and their builders.

Cell (i, j) spans [origin_x + j*cell, origin_x + (j+1)*cell) in x and
likewise in y with row index i; values are float64 except land-use class
indices (int64).  Builders clip every feature against the cells its
bounding box touches, so cost scales with feature count, not grid size.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, FormatError
from ..taxonomy import LAND_CLASSES, LabelKind
from .geometry import clip_polygon_area, ring_area
from .vectors import FeatureKind

log = logging.getLogger(__name__)

_RANGES = {LabelKind.BD: (0.0, 1.0), LabelKind.FAR: (0.0, 10.0),
           LabelKind.POP: (0.0, 7500.0)}


@dataclass(frozen=True)
class GridSpec:
    """Regular row/column lattice of square cells in planar meters."""

    origin: tuple
    rows: int
    cols: int
    cell_size: float = 240.0

    def __post_init__(self):
        if self.cell_size <= 0:
            raise DataError(f"cell size must be positive, got {self.cell_size}")
        if self.rows < 1 or self.cols < 1:
            raise DataError(f"grid needs positive extent, got {self.rows}x{self.cols}")
        object.__setattr__(self, "origin",
                           (float(self.origin[0]), float(self.origin[1])))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def cell_bounds(self, i, j):
        """(x0, y0, x1, y1) rectangle of cell (i, j)."""
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise DataError(f"cell ({i}, {j}) outside {self.rows}x{self.cols} grid")
        ox, oy = self.origin
        s = self.cell_size
        return (ox + j * s, oy + i * s, ox + (j + 1) * s, oy + (i + 1) * s)

    def cell_range(self, bounds):
        """Row/col index ranges of cells whose area may meet `bounds`."""
        xmin, ymin, xmax, ymax = bounds
        ox, oy = self.origin
        s = self.cell_size
        j0 = max(int(np.floor((xmin - ox) / s)), 0)
        j1 = min(int(np.ceil((xmax - ox) / s)), self.cols)
        i0 = max(int(np.floor((ymin - oy) / s)), 0)
        i1 = min(int(np.ceil((ymax - oy) / s)), self.rows)
        return range(i0, i1), range(j0, j1)


class LabelGrid:
    """Per-cell label values of one kind, with a validity mask."""

    def __init__(self, grid, values, kind, mask=None):
        if not isinstance(kind, LabelKind):
            raise DataError(f"bad label kind {kind!r}")
        dtype = np.int64 if kind == LabelKind.LAND else np.float64
        values = np.asarray(values, dtype=dtype)
        if values.shape != grid.shape:
            raise DataError(
                f"values shape {values.shape} does not match grid {grid.shape}")
        if mask is None:
            mask = np.ones(grid.shape, dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != grid.shape:
            raise DataError(f"mask shape {mask.shape} does not match grid {grid.shape}")
        if kind == LabelKind.LAND:
            used = values[mask]
            if used.size and (used.min() < 0 or used.max() >= len(LAND_CLASSES)):
                raise DataError("land class index outside 0..12")
        else:
            lo, hi = _RANGES[kind]
            used = values[mask]
            if used.size and (used.min() < lo or used.max() > hi):
                raise DataError(f"{kind.value} values outside [{lo}, {hi}]")
        self.grid = grid
        self.values = values
        self.kind = kind
        self.mask = mask

    def valid_count(self):
        return int(self.mask.sum())


def _clipped_cells(feature, grid):
    """Yield (i, j, intersection area) over cells the feature touches."""
    rows, cols = grid.cell_range(feature.bounds())
    for i in rows:
        for j in cols:
            a = clip_polygon_area(feature, grid.cell_bounds(i, j))
            if a > 0.0:
                yield i, j, a


def _check_kinds(features, kind, what):
    for f in features:
        if f.kind != kind:
            raise DataError(f"{what} expects {kind.value} features, got {f.kind.value}")


def building_density_grid(buildings, grid):
    """BD per cell: sum of clipped building areas / cell area, in [0, 1]."""
    _check_kinds(buildings, FeatureKind.BUILDING, "building_density_grid")
    acc = np.zeros(grid.shape, dtype=np.float64)
    for b in buildings:
        for i, j, a in _clipped_cells(b, grid):
            acc[i, j] += a
    bd = acc / (grid.cell_size ** 2)
    over = bd > 1.0
    if over.any():
        log.warning("building density exceeds 1 in %d cells (overlapping "
                    "buildings?); clamping", int(over.sum()))
        bd = np.minimum(bd, 1.0)
    return LabelGrid(grid, bd, LabelKind.BD)


def floor_area_ratio_grid(buildings, grid):
    """FAR per cell: sum of clipped area x floors / cell area, in [0, 10]."""
    _check_kinds(buildings, FeatureKind.BUILDING, "floor_area_ratio_grid")
    acc = np.zeros(grid.shape, dtype=np.float64)
    for b in buildings:
        for i, j, a in _clipped_cells(b, grid):
            acc[i, j] += a * b.floors
    far = acc / (grid.cell_size ** 2)
    over = far > 10.0
    if over.any():
        log.warning("floor-area ratio exceeds 10 in %d cells; clamping",
                    int(over.sum()))
        far = np.minimum(far, 10.0)
    return LabelGrid(grid, far, LabelKind.FAR)


def population_grid(blocks, grid):
    """Areal-weighted population per cell; uncovered cells are masked.

    Each block's count is split among cells in proportion to intersected
    area, so total population is conserved wherever the grid covers the
    blocks.
    """
    _check_kinds(blocks, FeatureKind.BLOCK, "population_grid")
    acc = np.zeros(grid.shape, dtype=np.float64)
    covered = np.zeros(grid.shape, dtype=bool)
    for b in blocks:
        area = ring_area(b.ring)
        if area <= 0.0:
            log.warning("zero-area block ignored (population %s)", b.population)
            continue
        for i, j, a in _clipped_cells(b, grid):
            acc[i, j] += b.population * (a / area)
            covered[i, j] = True
    over = covered & (acc > 7500.0)
    if over.any():
        log.warning("population exceeds 7500 in %d cells; clamping", int(over.sum()))
        acc = np.minimum(acc, 7500.0)
    return LabelGrid(grid, acc, LabelKind.POP, mask=covered)


def landuse_grid(zones, grid):
    """Majority-area land-use class per cell; ties go to the lower index."""
    _check_kinds(zones, FeatureKind.LANDUSE, "landuse_grid")
    acc = np.zeros(grid.shape + (len(LAND_CLASSES),), dtype=np.float64)
    for z in zones:
        for i, j, a in _clipped_cells(z, grid):
            acc[i, j, z.class_code] += a
    covered = acc.sum(axis=2) > 0.0
    # np.argmax returns the first maximum, which is the lowest class index.
    values = np.argmax(acc, axis=2).astype(np.int64)
    values[~covered] = 0
    return LabelGrid(grid, values, LabelKind.LAND, mask=covered)


# ---------------------------------------------------------------------------
# CSV serialization: header "row,col,value,mask", one line per cell,
# row-major; masked cells leave the value column empty.  A gridspec
# sidecar carries the lattice itself so grids round-trip from files.

def write_gridspec_csv(path, spec):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("origin_x,origin_y,cell_size,rows,cols\n")
        fh.write(f"{spec.origin[0]!r},{spec.origin[1]!r},"
                 f"{spec.cell_size!r},{spec.rows},{spec.cols}\n")


def read_gridspec_csv(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if len(lines) != 2 or lines[0] != "origin_x,origin_y,cell_size,rows,cols":
        raise FormatError(f"{path}: bad gridspec file")
    parts = lines[1].split(",")
    if len(parts) != 5:
        raise FormatError(f"{path}: bad gridspec row")
    try:
        return GridSpec(origin=(float(parts[0]), float(parts[1])),
                        cell_size=float(parts[2]),
                        rows=int(parts[3]), cols=int(parts[4]))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_grid_csv(path, label_grid):
    lines = ["row,col,value,mask"]
    values = label_grid.values
    mask = label_grid.mask
    land = label_grid.kind == LabelKind.LAND
    for i in range(label_grid.grid.rows):
        for j in range(label_grid.grid.cols):
            if mask[i, j]:
                v = int(values[i, j]) if land else repr(float(values[i, j]))
                lines.append(f"{i},{j},{v},1")
            else:
                lines.append(f"{i},{j},,0")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_grid_csv(path, grid, kind):
    """Read a grid CSV written by write_grid_csv back into a LabelGrid."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != "row,col,value,mask":
        raise FormatError(f"{path}: missing 'row,col,value,mask' header")
    body = lines[1:]
    if len(body) != grid.rows * grid.cols:
        raise FormatError(
            f"{path}: {len(body)} data lines for a {grid.rows}x{grid.cols} grid")
    dtype = np.int64 if kind == LabelKind.LAND else np.float64
    values = np.zeros(grid.shape, dtype=dtype)
    mask = np.zeros(grid.shape, dtype=bool)
    for n, line in enumerate(body):
        parts = line.split(",")
        if len(parts) != 4:
            raise FormatError(f"{path}: line {n + 2}: expected 4 fields")
        try:
            i, j, flag = int(parts[0]), int(parts[1]), int(parts[3])
        except ValueError as exc:
            raise FormatError(f"{path}: line {n + 2}: {exc}") from exc
        if (i, j) != divmod(n, grid.cols):
            raise FormatError(f"{path}: line {n + 2}: cells out of row-major order")
        if flag not in (0, 1):
            raise FormatError(f"{path}: line {n + 2}: mask must be 0 or 1")
        if flag:
            try:
                values[i, j] = int(parts[2]) if kind == LabelKind.LAND \
                    else float(parts[2])
            except ValueError as exc:
                raise FormatError(f"{path}: line {n + 2}: {exc}") from exc
            mask[i, j] = True
        elif parts[2] != "":
            raise FormatError(f"{path}: line {n + 2}: masked cell carries a value")
    return LabelGrid(grid, values, kind, mask=mask)
