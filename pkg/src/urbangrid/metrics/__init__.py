"""Evaluation: error matrices, accuracy statistics, and change analysis."""

from .confusion import (
    ConfusionMatrix,
    MetricsReport,
    accuracy_report,
    confusion_matrix,
    load_reference_assessment,
)
from .compare import (
    ChangeReport,
    class_ratios,
    compare_products,
    mae,
    mean_density_by_class,
    pearson_r,
    percent_string,
    pop_per_km2,
    ratios_table,
    write_change_report,
)

__all__ = [
    "ConfusionMatrix",
    "MetricsReport",
    "accuracy_report",
    "confusion_matrix",
    "load_reference_assessment",
    "ChangeReport",
    "class_ratios",
    "compare_products",
    "mae",
    "mean_density_by_class",
    "pearson_r",
    "percent_string",
    "pop_per_km2",
    "ratios_table",
    "write_change_report",
]
