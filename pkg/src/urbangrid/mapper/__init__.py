"""Raster handling, grid tiling, and map-product inference."""

from .raster import (
    LAND_PALETTE,
    RasterImage,
    colorize_land,
    read_raster,
    write_ppm,
    write_raster,
)
from .tiling import grid_for_raster, tile_raster
from .products import MapProduct, predict_products, read_products, write_products

__all__ = [
    "LAND_PALETTE",
    "RasterImage",
    "colorize_land",
    "read_raster",
    "write_ppm",
    "write_raster",
    "grid_for_raster",
    "tile_raster",
    "MapProduct",
    "predict_products",
    "read_products",
    "write_products",
]
