"""Error matrix and the classification accuracy statistics derived from it."""

from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from ..taxonomy import LAND_CLASSES

_ASSESSMENT_FIXTURE = "data/landuse_assessment.csv"


@dataclass
class ConfusionMatrix:
    """K x K counts; rows are classified labels, columns reference labels."""

    counts: np.ndarray
    class_names: tuple = None

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise DataError(f"confusion matrix must be square, got {counts.shape}")
        if (counts < 0).any():
            raise DataError("confusion matrix counts must be non-negative")
        if counts.sum() <= 0:
            raise DataError("confusion matrix is empty")
        self.counts = counts
        if self.class_names is None:
            self.class_names = tuple(str(i + 1) for i in range(counts.shape[0]))
        elif len(self.class_names) != counts.shape[0]:
            raise DataError("one class name per matrix row required")

    @property
    def size(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())

    def row_totals(self):
        return self.counts.sum(axis=1)

    def col_totals(self):
        return self.counts.sum(axis=0)


@dataclass
class MetricsReport:
    """Accuracy summary; undefined per-class entries are NaN."""

    overall_accuracy: float
    kappa: float
    users_accuracy: np.ndarray
    producers_accuracy: np.ndarray


def confusion_matrix(predicted, reference):
    """Count (predicted class, reference class) pairs over joint cells."""
    if predicted.grid != reference.grid:
        raise DataError("predicted and reference grids use different specs")
    joint = predicted.mask & reference.mask
    if not joint.any():
        raise DataError("no jointly valid cells to compare")
    k = len(LAND_CLASSES)
    p = predicted.values[joint].astype(np.int64)
    r = reference.values[joint].astype(np.int64)
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (p, r), 1)
    return ConfusionMatrix(counts, class_names=LAND_CLASSES)


def accuracy_report(cm):
    """OA, Kappa, and per-class user's/producer's accuracy.

    Kappa uses the chance agreement p_e = sum_i row_i * col_i / N^2.
    Empty rows/columns give NaN UA/PA for that class.
    """
    counts = cm.counts.astype(np.float64)
    n = counts.sum()
    diag = np.diag(counts)
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    oa = float(diag.sum() / n)
    with np.errstate(invalid="ignore", divide="ignore"):
        ua = np.where(rows > 0, diag / rows, np.nan)
        pa = np.where(cols > 0, diag / cols, np.nan)
    pe = float((rows * cols).sum() / (n * n))
    kappa = np.nan if pe >= 1.0 else (oa - pe) / (1.0 - pe)
    return MetricsReport(overall_accuracy=oa, kappa=float(kappa),
                         users_accuracy=ua, producers_accuracy=pa)


def load_reference_assessment():
    """Shipped 13-class assessment fixture.

    Returns (ConfusionMatrix, printed UA percents, printed PA percents).
    """
    import importlib.resources as resources

    text = (resources.files(__package__) / _ASSESSMENT_FIXTURE).read_text("ascii")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = "row," + ",".join(f"c{i}" for i in range(1, 14)) + ",ua_percent"
    if not lines or lines[0] != header:
        raise DataError("assessment fixture has an unexpected header")
    k = 13
    counts = np.zeros((k, k), dtype=np.int64)
    ua = np.zeros(k)
    pa = None
    for line in lines[1:]:
        parts = line.split(",")
        if parts[0] == "pa":
            pa = np.array([float(v) for v in parts[1:k + 1]])
            continue
        i = int(parts[0]) - 1
        counts[i] = [int(v) for v in parts[1:k + 1]]
        ua[i] = float(parts[k + 1])
    if pa is None:
        raise DataError("assessment fixture lacks the pa row")
    return ConfusionMatrix(counts, class_names=LAND_CLASSES), ua, pa
