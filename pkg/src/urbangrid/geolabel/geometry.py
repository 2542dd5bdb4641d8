"""Exact polygon/cell intersection areas (Sutherland-Hodgman + shoelace).

Rings are (n, 2) float arrays in planar meters, closed (first point
repeated last) and counterclockwise.  Cells are axis-aligned rectangles
(x0, y0, x1, y1).  Clipping a simple polygon against a convex window is
exact up to floating-point rounding, so per-cell areas of a polygon sum
to its total area to ~1e-15 relative.
"""

import numpy as np


def ring_area(ring):
    """Signed shoelace area; positive for counterclockwise rings."""
    r = np.asarray(ring, dtype=np.float64)
    if r.ndim != 2 or r.shape[1] != 2 or r.shape[0] < 3:
        return 0.0
    x, y = r[:, 0], r[:, 1]
    # Works for open or closed rings: the wrap term vanishes when closed.
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _clip_halfplane(points, axis, bound, keep_below):
    """One Sutherland-Hodgman pass against x|y <= bound or >= bound.

    `points` is an open ring (last vertex not repeated); returns the same
    convention.  Vertices exactly on the boundary count as inside, so
    polygons that merely touch a cell edge contribute zero area without
    degenerating.
    """
    if not points:
        return []
    out = []
    n = len(points)
    for i in range(n):
        p = points[i]
        q = points[(i + 1) % n]
        if keep_below:
            p_in = p[axis] <= bound
            q_in = q[axis] <= bound
        else:
            p_in = p[axis] >= bound
            q_in = q[axis] >= bound
        if p_in and q_in:
            out.append(q)
        elif p_in and not q_in:
            out.append(_intersect(p, q, axis, bound))
        elif not p_in and q_in:
            out.append(_intersect(p, q, axis, bound))
            out.append(q)
        # both outside: nothing
    return out


def _intersect(p, q, axis, bound):
    """Point where segment p->q crosses the line axis == bound."""
    t = (bound - p[axis]) / (q[axis] - p[axis])
    if axis == 0:
        return (bound, p[1] + t * (q[1] - p[1]))
    return (p[0] + t * (q[0] - p[0]), bound)


def clip_ring(ring, cell):
    """Clip a closed ring to a rectangle; returns an open vertex list."""
    x0, y0, x1, y1 = cell
    r = np.asarray(ring, dtype=np.float64)
    pts = [tuple(p) for p in r[:-1]] if len(r) > 1 and np.array_equal(r[0], r[-1]) \
        else [tuple(p) for p in r]
    pts = _clip_halfplane(pts, 0, x0, keep_below=False)
    pts = _clip_halfplane(pts, 0, x1, keep_below=True)
    pts = _clip_halfplane(pts, 1, y0, keep_below=False)
    pts = _clip_halfplane(pts, 1, y1, keep_below=True)
    return pts


def clip_polygon_area(polygon, cell):
    """Area (m^2) of polygon ∩ cell for an axis-aligned cell rectangle.

    `polygon` may be a PolygonFeature or a raw ring array.  Degenerate
    rings yield 0.  The result is never negative.
    """
    ring = polygon.ring if hasattr(polygon, "ring") else polygon
    pts = clip_ring(ring, cell)
    if len(pts) < 3:
        return 0.0
    arr = np.array(pts, dtype=np.float64)
    return max(ring_area(arr), 0.0)
