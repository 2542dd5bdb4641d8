# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel core: patch packing and max-pool routing.

Bit-for-bit compatible with the numpy fallback in ``_fallback.py``: the
accumulation order of every scatter-add is identical, so either backend
may be swapped in without changing results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "c"


def im2col(double[:, :, ::1] x, int k, int pad):
    cdef int h = x.shape[0], w = x.shape[1], c = x.shape[2]
    cdef int ho = h + 2 * pad - k + 1
    cdef int wo = w + 2 * pad - k + 1
    out_arr = np.empty((ho * wo, k * k * c), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef int oy, ox, dy, dx, ci, iy, ix, row, col
    with nogil:
        for oy in range(ho):
            for ox in range(wo):
                row = oy * wo + ox
                col = 0
                for dy in range(k):
                    iy = oy + dy - pad
                    for dx in range(k):
                        ix = ox + dx - pad
                        if 0 <= iy < h and 0 <= ix < w:
                            for ci in range(c):
                                out[row, col + ci] = x[iy, ix, ci]
                        else:
                            for ci in range(c):
                                out[row, col + ci] = 0.0
                        col += c
    return out_arr


def col2im(double[:, ::1] cols, int h, int w, int c, int k, int pad):
    cdef int ho = h + 2 * pad - k + 1
    cdef int wo = w + 2 * pad - k + 1
    dx_arr = np.zeros((h, w, c), dtype=np.float64)
    cdef double[:, :, ::1] dxv = dx_arr
    cdef int oy, ox, dy, dxi, ci, iy, ix, row, col
    with nogil:
        # (dy, dx) stays outermost so each input element accumulates its
        # contributions in the same order as the fallback's slice loop.
        for dy in range(k):
            for dxi in range(k):
                col = (dy * k + dxi) * c
                for oy in range(ho):
                    iy = oy + dy - pad
                    if iy < 0 or iy >= h:
                        continue
                    for ox in range(wo):
                        ix = ox + dxi - pad
                        if ix < 0 or ix >= w:
                            continue
                        row = oy * wo + ox
                        for ci in range(c):
                            dxv[iy, ix, ci] += cols[row, col + ci]
    return dx_arr


def maxpool_forward(double[:, :, ::1] x, int region, int stride):
    cdef int h = x.shape[0], w = x.shape[1], c = x.shape[2]
    cdef int ho = (h - region) // stride + 1
    cdef int wo = (w - region) // stride + 1
    out_arr = np.empty((ho, wo, c), dtype=np.float64)
    arg_arr = np.empty((ho, wo, c), dtype=np.int64)
    cdef double[:, :, ::1] out = out_arr
    cdef cnp.int64_t[:, :, ::1] arg = arg_arr
    cdef int oy, ox, ci, wy, wx, iy, ix
    cdef cnp.int64_t flat
    cdef double v
    with nogil:
        # Channels stay innermost so window rows are read contiguously;
        # scanning (wy, wx) in ascending order with a strict comparison
        # keeps the first-maximum-wins tie rule.
        for oy in range(ho):
            for ox in range(wo):
                iy = oy * stride
                ix = ox * stride
                flat = ((<cnp.int64_t> iy * w) + ix) * c
                for ci in range(c):
                    out[oy, ox, ci] = x[iy, ix, ci]
                    arg[oy, ox, ci] = flat + ci
                for wy in range(region):
                    iy = oy * stride + wy
                    for wx in range(region):
                        ix = ox * stride + wx
                        flat = ((<cnp.int64_t> iy * w) + ix) * c
                        for ci in range(c):
                            v = x[iy, ix, ci]
                            if v > out[oy, ox, ci]:
                                out[oy, ox, ci] = v
                                arg[oy, ox, ci] = flat + ci
    return out_arr, arg_arr


def maxpool_backward(double[:, :, ::1] dout, cnp.int64_t[:, :, ::1] arg,
                     int h, int w, int c):
    dx_arr = np.zeros(h * w * c, dtype=np.float64)
    cdef double[::1] dx = dx_arr
    cdef int oy, ox, ci
    with nogil:
        for oy in range(dout.shape[0]):
            for ox in range(dout.shape[1]):
                for ci in range(dout.shape[2]):
                    dx[arg[oy, ox, ci]] += dout[oy, ox, ci]
    return dx_arr.reshape(h, w, c)
