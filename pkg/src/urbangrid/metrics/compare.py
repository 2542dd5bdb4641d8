"""Continuous-layer statistics and whole-product change analysis."""

import os
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from ..errors import DataError
from ..taxonomy import LAND_CLASSES, LabelKind

_CELL_KM2 = 0.0576  # one 240 m cell in km^2


def percent_string(fraction, decimals=2):
    """Fraction as a percent string, round-half-up (e.g. 0.5 -> '50.00')."""
    quantum = Decimal(1).scaleb(-decimals)
    return str(Decimal(repr(float(fraction) * 100.0)).quantize(quantum,
                                                               ROUND_HALF_UP))


def pop_per_km2(persons_per_cell):
    """Persons/cell expressed as persons/km^2 (cells are 0.0576 km^2)."""
    return persons_per_cell / _CELL_KM2


def _joint(a, b):
    if a.grid != b.grid:
        raise DataError("grids use different specs")
    joint = a.mask & b.mask
    if not joint.any():
        raise DataError("no jointly valid cells")
    return joint


def mae(predicted, reference):
    """Mean absolute error over jointly valid cells."""
    joint = _joint(predicted, reference)
    diff = predicted.values[joint].astype(np.float64) \
        - reference.values[joint].astype(np.float64)
    return float(np.abs(diff).mean())


def pearson_r(predicted, reference):
    """Sample Pearson correlation; None when either side has no variance."""
    joint = _joint(predicted, reference)
    x = predicted.values[joint].astype(np.float64)
    y = reference.values[joint].astype(np.float64)
    if x.size < 2:
        raise DataError("pearson_r needs at least 2 jointly valid cells")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.dot(xc, xc))
    sy = float(np.dot(yc, yc))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(np.dot(xc, yc) / np.sqrt(sx * sy))


def class_ratios(land):
    """Fraction of valid cells per land class; sums to 1."""
    if not land.mask.any():
        raise DataError("class_ratios needs at least one valid cell")
    vals = land.values[land.mask]
    counts = np.bincount(vals, minlength=len(LAND_CLASSES)).astype(np.float64)
    return counts / counts.sum()


def ratios_table(land, names=LAND_CLASSES):
    """CSV lines 'class,ratio_percent' with 2-decimal percents."""
    ratios = class_ratios(land)
    lines = ["class,ratio_percent"]
    for name, r in zip(names, ratios):
        lines.append(f"{name},{percent_string(r)}")
    return "\n".join(lines) + "\n"


def mean_density_by_class(land, bd, far):
    """Per-class mean BD and FAR over that class's jointly valid cells.

    Returns (mean_bd, mean_far) arrays with NaN for absent classes.
    """
    joint = land.mask & bd.mask & far.mask
    if land.grid != bd.grid or land.grid != far.grid:
        raise DataError("grids use different specs")
    k = len(LAND_CLASSES)
    mean_bd = np.full(k, np.nan)
    mean_far = np.full(k, np.nan)
    classes = land.values[joint]
    bd_vals = bd.values[joint]
    far_vals = far.values[joint]
    for c in range(k):
        sel = classes == c
        if sel.any():
            mean_bd[c] = bd_vals[sel].mean()
            mean_far[c] = far_vals[sel].mean()
    return mean_bd, mean_far


@dataclass
class ChangeReport:
    """Product-to-product comparison (a relative to b)."""

    ratio_delta: np.ndarray          # per-class valid-cell fraction, a - b
    layer_mae: dict                  # kind -> MAE
    layer_r: dict                    # kind -> Pearson r or None
    scatter: dict                    # kind -> (n, 2) array of (a, b) values
    agreement: np.ndarray            # land agreement over jointly valid cells
    agreement_fraction: float


def compare_products(a, b):
    """Change analysis between two map products on one grid."""
    if a.grid != b.grid:
        raise DataError("products use different grid specs")
    ratio_delta = class_ratios(a.land) - class_ratios(b.land)
    layer_mae, layer_r, scatter = {}, {}, {}
    for kind, la, lb in ((LabelKind.BD, a.bd, b.bd), (LabelKind.FAR, a.far, b.far),
                         (LabelKind.POP, a.pop, b.pop)):
        joint = _joint(la, lb)
        layer_mae[kind] = mae(la, lb)
        layer_r[kind] = pearson_r(la, lb)
        scatter[kind] = np.column_stack(
            (la.values[joint], lb.values[joint])).astype(np.float64)
    joint_land = a.land.mask & b.land.mask
    if not joint_land.any():
        raise DataError("no jointly valid land cells")
    agreement = a.land.values[joint_land] == b.land.values[joint_land]
    return ChangeReport(
        ratio_delta=ratio_delta,
        layer_mae=layer_mae,
        layer_r=layer_r,
        scatter=scatter,
        agreement=agreement,
        agreement_fraction=float(agreement.mean()),
    )


def write_change_report(report, directory):
    """Write a ChangeReport as CSV files; returns the paths written."""
    os.makedirs(directory, exist_ok=True)
    written = []

    path = os.path.join(directory, "ratio_delta.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("class,delta_percent\n")
        for name, d in zip(LAND_CLASSES, report.ratio_delta):
            fh.write(f"{name},{percent_string(d)}\n")
    written.append(path)

    path = os.path.join(directory, "layer_stats.csv")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("layer,mae,pearson_r\n")
        for kind in (LabelKind.BD, LabelKind.FAR, LabelKind.POP):
            r = report.layer_r[kind]
            fh.write(f"{kind.value},{report.layer_mae[kind]!r},"
                     f"{'' if r is None else repr(r)}\n")
    written.append(path)

    for kind, pairs in report.scatter.items():
        path = os.path.join(directory, f"scatter_{kind.value}.csv")
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("value_a,value_b\n")
            for va, vb in pairs:
                fh.write(f"{float(va)!r},{float(vb)!r}\n")
        written.append(path)

    path = os.path.join(directory, "land_agreement.csv")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("agreement_fraction\n")
        fh.write(f"{report.agreement_fraction!r}\n")
    written.append(path)
    return written
