"""Independent reference implementations used to check the package.

Everything here is deliberately written with a different algorithm (or at
least a different loop structure) than the library code it validates:
convolution and pooling as plain nested loops, point-in-polygon as an
even-odd ray cast, and clipped areas as Monte-Carlo estimates.  Slow is
fine; these only run on small inputs or with explicit sample budgets.
"""

import numpy as np


def conv2d_naive(x, weights, bias, padding=0):
    """Direct quadruple-loop convolution (HWC input, (kh, kw, cin, cout))."""
    h, w, cin = x.shape
    kh, kw, wcin, cout = weights.shape
    assert wcin == cin
    if padding:
        xp = np.zeros((h + 2 * padding, w + 2 * padding, cin), dtype=x.dtype)
        xp[padding:padding + h, padding:padding + w] = x
        x = xp
        h, w = x.shape[:2]
    oh = h - kh + 1
    ow = w - kw + 1
    out = np.empty((oh, ow, cout), dtype=np.float64)
    for i in range(oh):
        for j in range(ow):
            patch = x[i:i + kh, j:j + kw, :]
            for co in range(cout):
                out[i, j, co] = np.sum(patch * weights[:, :, :, co]) + bias[co]
    return out


def maxpool_naive(x, region, stride):
    h, w, c = x.shape
    oh = (h - region) // stride + 1
    ow = (w - region) // stride + 1
    out = np.empty((oh, ow, c), dtype=x.dtype)
    for i in range(oh):
        for j in range(ow):
            win = x[i * stride:i * stride + region, j * stride:j * stride + region, :]
            out[i, j, :] = win.max(axis=(0, 1))
    return out


def avgpool_naive(x, region, stride):
    h, w, c = x.shape
    oh = (h - region) // stride + 1
    ow = (w - region) // stride + 1
    out = np.empty((oh, ow, c), dtype=np.float64)
    for i in range(oh):
        for j in range(ow):
            win = x[i * stride:i * stride + region, j * stride:j * stride + region, :]
            out[i, j, :] = win.mean(axis=(0, 1))
    return out


def points_in_ring(px, py, ring):
    """Even-odd ray cast for arrays of query points.

    `ring` is a closed (n, 2) vertex array.  A horizontal ray is shot in +x;
    the usual half-open vertex rule avoids double counting at vertices.
    Points exactly on an edge may land on either side, which is harmless for
    Monte-Carlo use.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    inside = np.zeros(px.shape, dtype=bool)
    xs = ring[:-1, 0]
    ys = ring[:-1, 1]
    xe = ring[1:, 0]
    ye = ring[1:, 1]
    for x0, y0, x1, y1 in zip(xs, ys, xe, ye):
        if y0 == y1:
            continue
        crosses = (y0 > py) != (y1 > py)
        with np.errstate(invalid="ignore"):
            xhit = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (px < xhit)
    return inside


def mc_clip_area(ring, bounds, samples=1_000_000, seed=0):
    """Monte-Carlo estimate of the polygon area inside a bounding box.

    bounds = (x0, y0, x1, y1).  Samples uniform points in the box and counts
    hits with the independent ray cast above.
    """
    x0, y0, x1, y1 = bounds
    rng = np.random.default_rng(seed)
    px = rng.uniform(x0, x1, samples)
    py = rng.uniform(y0, y1, samples)
    hits = points_in_ring(px, py, ring)
    box = (x1 - x0) * (y1 - y0)
    return box * hits.mean()


def random_star_polygon(rng, center, rmin, rmax, nverts):
    """Random simple polygon: star-shaped around `center`, CCW, closed.

    Vertex angles are spaced so that no angular gap reaches pi; with all
    gaps below pi each edge stays inside its own angular wedge, which is
    what guarantees simplicity for arbitrary radii.
    """
    gaps = rng.uniform(0.8, 1.2, nverts)
    angles = 2.0 * np.pi * np.cumsum(gaps) / gaps.sum()
    angles += rng.uniform(0.0, 2.0 * np.pi)
    radii = rng.uniform(rmin, rmax, nverts)
    xs = center[0] + radii * np.cos(angles)
    ys = center[1] + radii * np.sin(angles)
    ring = np.column_stack([xs, ys])
    return np.vstack([ring, ring[:1]])


def shoelace(ring):
    """Signed area, written index-wise rather than vectorised."""
    total = 0.0
    for k in range(len(ring) - 1):
        total += ring[k, 0] * ring[k + 1, 1] - ring[k + 1, 0] * ring[k, 1]
    return 0.5 * total
