"""urbangrid: multi-task convolutional mapping of city rasters.

The package turns a georeferenced image plus polygon data (building
footprints, census blocks, land-use zones) into four gridded map products
on a 240 m reference grid: a 13-class land-use map, a building-density
map, a floor-area-ratio map and a population-density map.  A single
convolutional network with a shared trunk and four classification heads
is trained in two stages and then run tile-by-tile over the raster.

Subpackages
-----------
numerics   dense tensor kernels with hand-paired adjoints and SGD
net        the network definition, multi-task loss, training, checkpoints
geolabel   polygon-to-grid label generation and the synthetic test city
mapper     raster tiling, inference, map-product I/O
metrics    accuracy assessment and product comparison
"""

__version__ = "0.1.0"
