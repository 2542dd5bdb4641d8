"""Shared label taxonomy: the four map tasks and the 13 land-use classes."""

from enum import Enum


class LabelKind(Enum):
    """Which map task a label or grid belongs to."""

    LAND = "land"   # 13-class land use
    BD = "bd"       # building density, discretized to 25 levels on [0, 1]
    FAR = "far"     # floor-area ratio, 32 levels on [0, 10]
    POP = "pop"     # population per cell, 40 levels on [0, 7500]


#: Canonical land-use class order; grid values and confusion-matrix
#: indices follow this list.
LAND_CLASSES = (
    "Commercial",
    "Water area - river and lake",
    "Agriculture",
    "Green space and square",
    "Regional transport facilities",
    "Industrial",
    "Residential one",
    "Residential two",
    "Residential three",
    "Road, street and transportation",
    "Administration and public services",
    "Water area - pond",
    "Others",
)

#: Classifier head width per task.
HEAD_WIDTHS = {
    LabelKind.LAND: 13,
    LabelKind.BD: 25,
    LabelKind.FAR: 32,
    LabelKind.POP: 40,
}


def class_index(name_or_index):
    """Resolve a land-use class given its canonical name or integer index."""
    if isinstance(name_or_index, str):
        try:
            return LAND_CLASSES.index(name_or_index)
        except ValueError:
            raise KeyError(f"unknown land-use class {name_or_index!r}") from None
    idx = int(name_or_index)
    if not 0 <= idx < len(LAND_CLASSES):
        raise KeyError(f"land-use class index {idx} out of range")
    return idx
