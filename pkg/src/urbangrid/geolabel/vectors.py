"""Polygon features and a small GeoJSON subset reader/writer.

Supported input: a FeatureCollection of Polygon features in planar meter
coordinates, exterior ring only (no holes), with properties

    kind:       "building" | "block" | "landuse"
    floors:     positive integer            (buildings)
    population: non-negative number         (blocks)
    class:      land-use name or index 0-12 (landuse zones)
"""

import enum
import json
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, FormatError
from ..taxonomy import LAND_CLASSES, class_index
from .geometry import ring_area


class FeatureKind(enum.Enum):
    BUILDING = "building"
    BLOCK = "block"
    LANDUSE = "landuse"


@dataclass(frozen=True)
class PolygonFeature:
    """Simple counterclockwise polygon with kind-specific attributes."""

    ring: np.ndarray
    kind: FeatureKind
    floors: int = None
    population: float = None
    class_code: int = None

    def __post_init__(self):
        ring = np.asarray(self.ring, dtype=np.float64)
        if ring.ndim != 2 or ring.shape[1] != 2:
            raise DataError(f"ring must be (n, 2), got shape {ring.shape}")
        if ring.shape[0] < 4:
            raise DataError(f"closed ring needs at least 4 points, got {ring.shape[0]}")
        if not np.array_equal(ring[0], ring[-1]):
            raise DataError("ring must be closed (first point repeated last)")
        if not np.isfinite(ring).all():
            raise DataError("ring coordinates must be finite")
        object.__setattr__(self, "ring", ring)
        if ring_area(ring) <= 0.0:
            raise DataError("ring must be counterclockwise with positive area")
        if self.kind == FeatureKind.BUILDING:
            try:
                floors = int(self.floors)
                ok = floors == self.floors and floors >= 1
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise DataError(f"building needs positive integer floors, got {self.floors!r}")
            object.__setattr__(self, "floors", floors)
        elif self.kind == FeatureKind.BLOCK:
            try:
                pop = float(self.population)
                ok = np.isfinite(pop) and pop >= 0
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise DataError(f"block needs non-negative population, got {self.population!r}")
            object.__setattr__(self, "population", pop)
        elif self.kind == FeatureKind.LANDUSE:
            try:
                code = int(self.class_code)
                ok = code == self.class_code and 0 <= code < len(LAND_CLASSES)
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise DataError(f"unknown land-use class code {self.class_code!r}")
            object.__setattr__(self, "class_code", code)
        else:
            raise DataError(f"unknown feature kind {self.kind!r}")

    @property
    def area(self):
        return ring_area(self.ring)

    def bounds(self):
        """(xmin, ymin, xmax, ymax) of the ring."""
        return (float(self.ring[:, 0].min()), float(self.ring[:, 1].min()),
                float(self.ring[:, 0].max()), float(self.ring[:, 1].max()))


def _parse_class(value):
    if isinstance(value, bool):
        raise DataError(f"bad land-use class {value!r}")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            return class_index(value)
    raise DataError(f"bad land-use class {value!r}")


def read_features(path):
    """Read the GeoJSON subset into a list of PolygonFeature."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise FormatError(f"{path}: expected a FeatureCollection")
    features = []
    for i, feat in enumerate(doc.get("features", [])):
        where = f"{path}: feature {i}"
        if feat.get("type") != "Feature":
            raise FormatError(f"{where}: not a Feature")
        geom = feat.get("geometry") or {}
        if geom.get("type") != "Polygon":
            raise FormatError(f"{where}: only Polygon geometry is supported")
        rings = geom.get("coordinates") or []
        if len(rings) == 0:
            raise FormatError(f"{where}: empty coordinates")
        if len(rings) > 1:
            raise FormatError(f"{where}: interior rings (holes) are not supported")
        props = feat.get("properties") or {}
        kind_name = props.get("kind")
        try:
            kind = FeatureKind(kind_name)
        except ValueError:
            raise FormatError(f"{where}: unknown kind {kind_name!r}") from None
        try:
            feature = PolygonFeature(
                ring=np.asarray(rings[0], dtype=np.float64),
                kind=kind,
                floors=props.get("floors"),
                population=props.get("population"),
                class_code=(_parse_class(props["class"])
                            if kind == FeatureKind.LANDUSE else None),
            )
        except KeyError:
            raise FormatError(f"{where}: landuse feature lacks a class") from None
        except DataError as exc:
            raise DataError(f"{where}: {exc}") from exc
        features.append(feature)
    return features


def write_features(path, features):
    """Write features as a GeoJSON FeatureCollection (deterministic bytes)."""
    out = {"type": "FeatureCollection", "features": []}
    for f in features:
        props = {"kind": f.kind.value}
        if f.kind == FeatureKind.BUILDING:
            props["floors"] = f.floors
        elif f.kind == FeatureKind.BLOCK:
            props["population"] = f.population
        else:
            props["class"] = f.class_code
        out["features"].append({
            "type": "Feature",
            "geometry": {
                "type": "Polygon",
                "coordinates": [[[float(x), float(y)] for x, y in f.ring]],
            },
            "properties": props,
        })
    text = json.dumps(out, separators=(",", ":"), sort_keys=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.write("\n")
