"""Deterministic tensor operations with hand-paired adjoints.

Every forward function returns ``(output, cache)`` where `cache` carries
exactly what the matching ``*_backward`` needs; there is no general
autodiff graph.  All arithmetic is float64, convolution stride is fixed
at 1, and spatial reduction happens only in the pooling ops.

Adjoint conventions (all deterministic):
  * ReLU passes gradient only where the input was strictly positive.
  * max-pool ties route gradient to the first maximal element in
    row-major window order.
  * average-pool spreads gradient uniformly over its window.
"""

import numpy as np

from ..errors import ShapeError
from . import kernels


def out_extent(extent, window, stride=1, pad=0):
    """Output size along one axis: floor((in + 2*pad - window)/stride) + 1."""
    return (extent + 2 * pad - window) // stride + 1


# ---------------------------------------------------------------------------
# convolution

def conv2d(x, weights, bias, padding=0):
    """2-D convolution, stride 1, optional zero padding.

    `weights` / `bias` may be Parameter objects or raw arrays of shapes
    (k, c, c, q) and (k,).  Output channel s is sum_i W_i^s * x^i + b_s.
    Returns (output (Ho, Wo, k), cache).
    """
    w = weights.value if hasattr(weights, "value") else weights
    b = bias.value if hasattr(bias, "value") else bias
    h, wd, q = x.shape
    k, c, c2, qw = w.shape
    if c != c2:
        raise ShapeError(f"non-square filter {c}x{c2}")
    if qw != q:
        raise ShapeError(f"filter depth {qw} != input channels {q}")
    ho = out_extent(h, c, 1, padding)
    wo = out_extent(wd, c, 1, padding)
    if ho < 1 or wo < 1:
        raise ShapeError(f"filter {c}x{c} larger than padded input {h}x{wd} (pad {padding})")
    cols = kernels.im2col(x, c, padding)          # (Ho*Wo, c*c*q)
    w2d = w.reshape(k, c * c * q)
    out = cols @ w2d.T
    out += b
    cache = (cols, w2d, x.shape, c, padding)
    return np.ascontiguousarray(out.reshape(ho, wo, k)), cache


def conv2d_backward(dout, cache, need_dx=True):
    """Adjoint of conv2d: gradients w.r.t. input, weights and bias."""
    cols, w2d, x_shape, c, padding = cache
    h, wd, q = x_shape
    k = w2d.shape[0]
    d2 = dout.reshape(-1, k)
    dw = (d2.T @ cols).reshape(k, c, c, q)
    db = d2.sum(axis=0)
    dx = None
    if need_dx:
        dcols = d2 @ w2d
        dx = kernels.col2im(np.ascontiguousarray(dcols), h, wd, q, c, padding)
    return dx, dw, db


# ---------------------------------------------------------------------------
# pooling

def _check_pool(x, region, stride):
    h, w, _ = x.shape
    if region > h or region > w:
        raise ShapeError(f"pool region {region} exceeds input extent {h}x{w}")
    if stride < 1:
        raise ShapeError("pool stride must be positive")


def maxpool2d(x, region, stride):
    """Max over region x region windows; returns (output, argmax record)."""
    _check_pool(x, region, stride)
    out, arg = kernels.maxpool_forward(x, region, stride)
    return out, arg


def maxpool2d_backward(dout, arg, x_shape):
    h, w, c = x_shape
    return kernels.maxpool_backward(np.ascontiguousarray(dout), arg, h, w, c)


def avgpool2d(x, region, stride):
    """Arithmetic mean over region x region windows."""
    _check_pool(x, region, stride)
    h, w, c = x.shape
    ho = out_extent(h, region, stride)
    wo = out_extent(w, region, stride)
    sh, sw, sc = x.strides
    windows = np.lib.stride_tricks.as_strided(
        x, shape=(ho, wo, region, region, c),
        strides=(sh * stride, sw * stride, sh, sw, sc))
    out = windows.sum(axis=(2, 3)) / (region * region)
    cache = (x.shape, region, stride)
    return np.ascontiguousarray(out), cache


def avgpool2d_backward(dout, cache):
    """Spread each output gradient uniformly over its window."""
    (h, w, c), region, stride = cache
    ho, wo = dout.shape[0], dout.shape[1]
    dx = np.zeros((h, w, c), dtype=np.float64)
    share = dout / (region * region)
    for wy in range(region):
        for wx in range(region):
            dx[wy:wy + ho * stride:stride, wx:wx + wo * stride:stride, :] += share
    return dx


# ---------------------------------------------------------------------------
# channel concatenation

def concat_channels(inputs):
    """Concatenate along the channel axis; spatial extents must agree."""
    if not inputs:
        raise ShapeError("concat_channels needs at least one input")
    spatial = inputs[0].shape[:2]
    for t in inputs[1:]:
        if t.shape[:2] != spatial:
            raise ShapeError(f"spatial mismatch in concat: {t.shape[:2]} vs {spatial}")
    widths = [t.shape[2] for t in inputs]
    return np.concatenate(inputs, axis=2), widths


def concat_channels_backward(dout, widths):
    """Slice the upstream gradient back to each input."""
    parts = []
    start = 0
    for w in widths:
        parts.append(np.ascontiguousarray(dout[:, :, start:start + w]))
        start += w
    return parts


# ---------------------------------------------------------------------------
# activations and loss

def relu(x):
    """Elementwise max(0, x); the output doubles as the cache."""
    out = np.maximum(x, 0.0)
    return out, out


def relu_backward(dout, cache):
    # out > 0 exactly where x > 0, so the cached output recovers the mask.
    return dout * (cache > 0.0)


def softmax_channels(x):
    """Channel-wise softmax at every spatial position (max-subtracted)."""
    shifted = x - x.max(axis=2, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=2, keepdims=True)


def softmax_channels_vjp(probs, dprobs):
    """Adjoint of softmax w.r.t. its logits, given d(loss)/d(probs)."""
    dot = (dprobs * probs).sum(axis=2, keepdims=True)
    return probs * (dprobs - dot)


PROB_FLOOR = 1e-12


def cross_entropy(probs, target_class):
    """-log p[target] for a 1x1xK probability tensor (p floored at 1e-12)."""
    k = probs.shape[2]
    if not 0 <= target_class < k:
        raise ShapeError(f"target class {target_class} out of range [0, {k})")
    p = max(float(probs[0, 0, target_class]), PROB_FLOOR)
    return float(-np.log(p))


def softmax_cross_entropy_grad(probs, target_class):
    """Gradient of cross_entropy(softmax(a), y) w.r.t. the logits a: p - y."""
    g = probs.copy()
    g[0, 0, target_class] -= 1.0
    return g
