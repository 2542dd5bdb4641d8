"""Pure-numpy kernel implementations.

These mirror the compiled core in ``_core.pyx`` exactly: every function
performs the same floating-point additions in the same order, so the two
backends produce bit-identical results (asserted in the test suite).

Layout conventions:
  * feature maps are C-contiguous float64 arrays of shape (H, W, C),
  * patch matrices are (H_out * W_out, k * k * C) with the columns in
    (dy, dx, channel) order,
  * argmax records are flat int64 indices into the (H, W, C) input.
"""

import numpy as np
from numpy.lib.stride_tricks import as_strided

NAME = "python"


def im2col(x, k, pad):
    """Gather k x k patches (stride 1) into a 2-D matrix, zero-padding edges."""
    h, w, c = x.shape
    if pad:
        padded = np.zeros((h + 2 * pad, w + 2 * pad, c), dtype=np.float64)
        padded[pad:pad + h, pad:pad + w, :] = x
    else:
        padded = x
    ho = h + 2 * pad - k + 1
    wo = w + 2 * pad - k + 1
    sh, sw, sc = padded.strides
    windows = as_strided(padded, shape=(ho, wo, k, k, c),
                         strides=(sh, sw, sh, sw, sc))
    return np.ascontiguousarray(windows).reshape(ho * wo, k * k * c)


def col2im(cols, h, w, c, k, pad):
    """Adjoint of im2col: scatter-add patch gradients back onto the input.

    Contributions to one input element are summed in ascending (dy, dx)
    order; the compiled core follows the same order.
    """
    ho = h + 2 * pad - k + 1
    wo = w + 2 * pad - k + 1
    grads = cols.reshape(ho, wo, k, k, c)
    buf = np.zeros((h + 2 * pad, w + 2 * pad, c), dtype=np.float64)
    for dy in range(k):
        for dx in range(k):
            buf[dy:dy + ho, dx:dx + wo, :] += grads[:, :, dy, dx, :]
    if pad:
        return np.ascontiguousarray(buf[pad:pad + h, pad:pad + w, :])
    return buf


def maxpool_forward(x, region, stride):
    """Window maxima plus the flat input index of each selected element.

    Ties go to the first maximal element in row-major window order.
    """
    h, w, c = x.shape
    ho = (h - region) // stride + 1
    wo = (w - region) // stride + 1
    sh, sw, sc = x.strides
    windows = as_strided(x, shape=(ho, wo, region, region, c),
                         strides=(sh * stride, sw * stride, sh, sw, sc))
    flat_windows = np.ascontiguousarray(
        windows.transpose(0, 1, 4, 2, 3)).reshape(ho, wo, c, region * region)
    widx = np.argmax(flat_windows, axis=3)
    oy = np.arange(ho)[:, None, None]
    ox = np.arange(wo)[None, :, None]
    ch = np.arange(c)[None, None, :]
    iy = oy * stride + widx // region
    ix = ox * stride + widx % region
    arg = ((iy * w + ix) * c + ch).astype(np.int64)
    out = x.reshape(-1)[arg]
    return np.ascontiguousarray(out), np.ascontiguousarray(arg)


def maxpool_backward(dout, arg, h, w, c):
    """Route upstream gradients to the recorded argmax positions.

    Duplicate indices (overlapping windows) accumulate in output row-major
    order, matching the compiled core's loop order.
    """
    dx = np.zeros(h * w * c, dtype=np.float64)
    np.add.at(dx, arg.reshape(-1), dout.reshape(-1))
    return dx.reshape(h, w, c)
