"""Uniform value discretization for the three regression label kinds.

Bins are left-closed/right-open with the top bin closed, so every value
in [lower, upper] maps to a level; out-of-range values clamp to the edge
bins.  Decoding returns the bin midpoint.
"""

from dataclasses import dataclass

from ..errors import DataError
from ..taxonomy import LabelKind


@dataclass(frozen=True)
class DiscretizationSpec:
    lower: float
    upper: float
    levels: int

    def __post_init__(self):
        if self.levels < 1:
            raise DataError(f"levels must be positive, got {self.levels}")
        if not self.upper > self.lower:
            raise DataError(
                f"upper ({self.upper}) must exceed lower ({self.lower})")

    @property
    def width(self):
        return (self.upper - self.lower) / self.levels


BD_SPEC = DiscretizationSpec(0.0, 1.0, 25)
FAR_SPEC = DiscretizationSpec(0.0, 10.0, 32)
POP_SPEC = DiscretizationSpec(0.0, 7500.0, 40)

_BY_KIND = {LabelKind.BD: BD_SPEC, LabelKind.FAR: FAR_SPEC, LabelKind.POP: POP_SPEC}


def spec_for(kind):
    """Discretization spec for a regression label kind (not LAND)."""
    if kind not in _BY_KIND:
        raise DataError(f"no discretization spec for label kind {kind!r}")
    return _BY_KIND[kind]


def discretize(value, spec):
    """Level index of `value`: min(floor((v - lower)/width), levels - 1).

    Values below `lower` clamp to level 0, values above `upper` to the
    top level; never raises.
    """
    level = int((float(value) - spec.lower) // spec.width)
    if level < 0:
        return 0
    if level >= spec.levels:
        return spec.levels - 1
    return level


def dediscretize(level, spec):
    """Bin midpoint: lower + (level + 0.5) * width."""
    if not 0 <= level < spec.levels:
        raise DataError(f"level {level} out of range [0, {spec.levels})")
    return spec.lower + (level + 0.5) * spec.width
