"""Raster container plus MCR1 binary I/O and PPM export.

MCR1 layout (all integers little-endian):

    bytes 0..3   magic "MCR1"
    u32          height, width, channels
    u8           dtype code (0 = uint8, 1 = float64)
    6 x f64      geotransform (x0, dx, 0, y0, 0, dy)
    raw          row-major interleaved pixel data

Pixel (r, c) covers the ground square
[x0 + c*dx, x0 + (c+1)*dx) x [y0 + r*dy, y0 + (r+1)*dy); rows advance in
+y so raster row order matches grid row order.
"""

import os
import struct

import numpy as np

from ..errors import FormatError, ShapeError

MAGIC = b"MCR1"

_DTYPE_CODE = {np.dtype(np.uint8): 0, np.dtype(np.float64): 1}
_CODE_DTYPE = {0: np.dtype(np.uint8), 1: np.dtype(np.float64)}

# Fixed colour table for the 13 land-use classes (index order matches
# taxonomy.LAND_CLASSES).  Documented in the README; PPM exports use it.
LAND_PALETTE = np.array([
    (228, 26, 28),     # 0  Commercial
    (55, 126, 184),    # 1  Water area - river and lake
    (255, 255, 153),   # 2  Agriculture
    (77, 175, 74),     # 3  Green space and square
    (152, 78, 163),    # 4  Regional transport facilities
    (166, 86, 40),     # 5  Industrial
    (254, 217, 166),   # 6  Residential one
    (253, 141, 60),    # 7  Residential two
    (230, 85, 13),     # 8  Residential three
    (120, 120, 120),   # 9  Road, street and transportation
    (247, 129, 191),   # 10 Administration and public services
    (166, 206, 227),   # 11 Water area - pond
    (210, 210, 210),   # 12 Others
], dtype=np.uint8)

MASK_COLOR = np.array((0, 0, 0), dtype=np.uint8)


def _discard(tmp):
    try:
        os.unlink(tmp)
    except OSError:
        pass


class RasterImage:
    """Georeferenced pixel array (uint8 or float64), planar meters."""

    def __init__(self, pixels, origin=(0.0, 0.0), pixel_size=1.2):
        pixels = np.asarray(pixels)
        if pixels.ndim == 2:
            pixels = pixels[:, :, None]
        if pixels.ndim != 3:
            raise ShapeError(f"raster must be 2-D or 3-D, got shape {pixels.shape}")
        if pixels.dtype not in _DTYPE_CODE:
            raise ShapeError(f"unsupported raster dtype {pixels.dtype}")
        if pixels.shape[0] < 200 or pixels.shape[1] < 200:
            raise ShapeError(
                f"raster must be at least 200x200 pixels, got "
                f"{pixels.shape[0]}x{pixels.shape[1]}")
        if pixel_size <= 0:
            raise ShapeError(f"pixel size must be positive, got {pixel_size}")
        self.pixels = np.ascontiguousarray(pixels)
        self.origin = (float(origin[0]), float(origin[1]))
        self.pixel_size = float(pixel_size)

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def channels(self):
        return self.pixels.shape[2]

    @property
    def geotransform(self):
        x0, y0 = self.origin
        p = self.pixel_size
        return (x0, p, 0.0, y0, 0.0, p)

    def window(self, row0, col0, height, width):
        """View of a pixel window; bounds-checked."""
        if row0 < 0 or col0 < 0 or row0 + height > self.height or col0 + width > self.width:
            raise ShapeError(
                f"window {height}x{width} at ({row0}, {col0}) exceeds raster "
                f"{self.height}x{self.width}")
        return self.pixels[row0:row0 + height, col0:col0 + width, :]


def write_raster(path, raster):
    """Write a RasterImage as MCR1; atomic (temp file + rename)."""
    pix = raster.pixels
    header = MAGIC + struct.pack(
        "<IIIB", raster.height, raster.width, raster.channels,
        _DTYPE_CODE[pix.dtype])
    gt = struct.pack("<6d", *raster.geotransform)
    if pix.dtype == np.uint8:
        body = np.ascontiguousarray(pix).tobytes()
    else:
        body = np.ascontiguousarray(pix, dtype="<f8").tobytes()
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "wb") as fh:
            fh.write(header)
            fh.write(gt)
            fh.write(body)
        os.replace(tmp, path)
    except Exception:
        _discard(tmp)
        raise


def read_raster(path):
    """Read an MCR1 file back into a RasterImage."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise FormatError(f"{path}: not an MCR1 raster")
    if len(blob) < 4 + 13 + 48:
        raise FormatError(f"{path}: truncated MCR1 header")
    h, w, c, code = struct.unpack_from("<IIIB", blob, 4)
    if code not in _CODE_DTYPE:
        raise FormatError(f"{path}: unknown dtype code {code}")
    gt = struct.unpack_from("<6d", blob, 17)
    if gt[2] != 0.0 or gt[4] != 0.0 or gt[1] <= 0.0 or gt[5] != gt[1]:
        raise FormatError(f"{path}: unsupported geotransform {gt}")
    dtype = _CODE_DTYPE[code]
    expected = 65 + h * w * c * dtype.itemsize
    if len(blob) != expected:
        raise FormatError(
            f"{path}: size {len(blob)} does not match header ({expected} expected)")
    data = np.frombuffer(blob[65:], dtype=dtype.newbyteorder("<"))
    pixels = data.reshape(h, w, c).astype(dtype)
    return RasterImage(pixels, origin=(gt[0], gt[3]), pixel_size=gt[1])


def colorize_land(values, mask, scale=1):
    """Map land-class indices to a flat-colour RGB image.

    Each cell becomes a scale x scale block of its palette colour; masked
    cells are painted black.
    """
    values = np.asarray(values)
    mask = np.asarray(mask, dtype=bool)
    if values.shape != mask.shape or values.ndim != 2:
        raise ShapeError("values and mask must be matching 2-D arrays")
    idx = np.where(mask, values.astype(np.int64), 0)
    if idx.min() < 0 or idx.max() >= len(LAND_PALETTE):
        raise ShapeError("land class index outside the 13-colour palette")
    rgb = LAND_PALETTE[idx]
    rgb[~mask] = MASK_COLOR
    if scale > 1:
        rgb = np.repeat(np.repeat(rgb, scale, axis=0), scale, axis=1)
    return rgb


def write_ppm(path, rgb):
    """Write an RGB uint8 array as binary PPM (P6)."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ShapeError("PPM export needs an (h, w, 3) uint8 array")
    h, w = rgb.shape[:2]
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "wb") as fh:
            fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
            fh.write(np.ascontiguousarray(rgb).tobytes())
        os.replace(tmp, path)
    except Exception:
        _discard(tmp)
        raise
