"""The multi-task network: construction, forward pass, backward pass.

Four shared feature-extraction stages produce a 128-channel average-pool
feature map.  Three parallel 1x1-conv softmax heads (land use, building
density, floor-area ratio) read it directly; the population head reads
the concatenation of those three softmax outputs with the feature map
(13 + 25 + 32 + 128 = 198 channels), so population gradients flow back
through the other heads into the trunk.

Every layer is convolutional, so inputs larger than 200x200 run fully
convolutionally and yield a spatial grid of head outputs.

Padding: stage I/II convolutions are unpadded; the 3x3 branches of
stages III/IV use padding 1 so both branches of each stage concatenate
at equal spatial extent, which is what lands a 200x200 input at exactly
10x10 entering the average pool.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, ShapeError
from ..numerics import ops
from ..numerics.tensor import Parameter
from ..taxonomy import LabelKind
from .config import NetworkConfig, TILE_PIXELS

HEAD_ORDER = (LabelKind.LAND, LabelKind.BD, LabelKind.FAR)


@dataclass
class HeadOutputs:
    """Per-task softmax outputs, each (grid_h, grid_w, classes)."""

    land: np.ndarray
    bd: np.ndarray
    far: np.ndarray
    pop: np.ndarray

    def get(self, kind):
        return getattr(self, kind.value)

    def grid_shape(self):
        return self.land.shape[:2]


class Network:
    """Parameter set plus per-channel input normalization statistics."""

    def __init__(self, config, params, norm_mean=None, norm_std=None):
        self.config = config
        self.params = params            # ordered name -> Parameter
        self.norm_mean = norm_mean      # (channels,) or None until fitted
        self.norm_std = norm_std

    def parameters(self):
        return list(self.params.values())

    def param(self, name):
        return self.params[name]

    def population_head_params(self):
        return [p for n, p in self.params.items() if n.startswith("head.pop")]

    def trunk_and_subnet_params(self):
        return [p for n, p in self.params.items()
                if not n.startswith("head.pop")]

    def value_count(self):
        return sum(p.size for p in self.params.values())

    def has_norm_stats(self):
        return (self.norm_mean is not None and self.norm_std is not None
                and np.all(np.isfinite(self.norm_mean))
                and np.all(np.isfinite(self.norm_std)))

    def normalize(self, tile):
        """Float64 copy of `tile`, standardized when statistics are fitted."""
        x = np.ascontiguousarray(tile, dtype=np.float64)
        if self.has_norm_stats():
            x = (x - self.norm_mean) / self.norm_std
        return x


def build_network(config=None, seed=0):
    """Allocate all parameters: He-initialized kernels, zero biases.

    Identical seeds yield bit-identical parameter sets.
    """
    config = config or NetworkConfig()
    rng = np.random.default_rng(seed)
    params = {}
    for name, shape in config.conv_shapes():
        k, c, _, q = shape
        std = np.sqrt(2.0 / (c * c * q))
        params[name + ".weight"] = Parameter(
            name + ".weight", rng.standard_normal(shape) * std)
        params[name + ".bias"] = Parameter(
            name + ".bias", np.zeros(k), is_bias=True)
    return Network(config, params)


def _conv_relu(net, name, x, padding):
    z, conv_cache = ops.conv2d(x, net.param(name + ".weight"),
                               net.param(name + ".bias"), padding)
    a, mask = ops.relu(z)
    return a, (conv_cache, mask)


def forward(net, tile):
    """Run the network on one tile; returns (HeadOutputs, cache).

    The cache carries every intermediate needed by `backward`.
    """
    h, w = tile.shape[:2]
    if h < TILE_PIXELS or w < TILE_PIXELS:
        raise ShapeError(f"input {h}x{w} smaller than {TILE_PIXELS}x{TILE_PIXELS}")
    if tile.ndim != 3 or tile.shape[2] != net.config.input_channels:
        raise ShapeError(
            f"expected {net.config.input_channels} channels, got {tile.shape}")
    cache = {}
    x = net.normalize(tile)

    x, cache["stage1.conv"] = _conv_relu(net, "stage1.conv", x, 0)
    cache["stage1.pool.in"] = x.shape
    x, cache["stage1.pool"] = ops.maxpool2d(x, 7, 4)

    x, cache["stage2.conv"] = _conv_relu(net, "stage2.conv", x, 0)
    cache["stage2.pool.in"] = x.shape
    x, cache["stage2.pool"] = ops.maxpool2d(x, 3, 2)

    a, cache["stage3.a"] = _conv_relu(net, "stage3.a", x, 0)
    b, cache["stage3.b"] = _conv_relu(net, "stage3.b", x, 1)
    x, cache["stage3.widths"] = ops.concat_channels([a, b])
    cache["stage3.pool.in"] = x.shape
    x, cache["stage3.pool"] = ops.maxpool2d(x, 3, 2)

    a, cache["stage4.a"] = _conv_relu(net, "stage4.a", x, 0)
    b, cache["stage4.b"] = _conv_relu(net, "stage4.b", x, 1)
    x, cache["stage4.widths"] = ops.concat_channels([a, b])
    cache["avgpool.in"] = x.shape
    feat, cache["avgpool"] = ops.avgpool2d(x, 10, 1)
    cache["feat.shape"] = feat.shape

    probs = {}
    for kind in HEAD_ORDER:
        name = f"head.{kind.value}"
        logits, cache[name] = ops.conv2d(
            feat, net.param(name + ".weight"), net.param(name + ".bias"), 0)
        probs[kind] = ops.softmax_channels(logits)

    pop_in, cache["pop.widths"] = ops.concat_channels(
        [probs[LabelKind.LAND], probs[LabelKind.BD], probs[LabelKind.FAR], feat])
    pop_logits, cache["head.pop"] = ops.conv2d(
        pop_in, net.param("head.pop.weight"), net.param("head.pop.bias"), 0)
    probs[LabelKind.POP] = ops.softmax_channels(pop_logits)
    cache["probs"] = probs

    heads = HeadOutputs(land=probs[LabelKind.LAND], bd=probs[LabelKind.BD],
                        far=probs[LabelKind.FAR], pop=probs[LabelKind.POP])
    return heads, cache


def _accumulate(param, grad):
    param.grad += grad


def _head_conv_backward(net, cache, kind, dlogits):
    """Backward through one head's 1x1 conv; returns d(input feature)."""
    name = f"head.{kind.value}"
    dx, dw, db = ops.conv2d_backward(dlogits, cache[name])
    _accumulate(net.param(name + ".weight"), dw)
    _accumulate(net.param(name + ".bias"), db)
    return dx


def backward(net, cache, dlogits_by_head):
    """Accumulate parameter gradients for given head logit gradients.

    `dlogits_by_head` maps LabelKind to an upstream gradient on that
    head's logits (missing/None entries contribute nothing, and the
    corresponding head parameters are left untouched, so unused heads
    keep exactly-zero gradients).  A population entry back-propagates
    through the concatenated softmax outputs into the other heads and
    the trunk, as the chained objective requires.
    """
    probs = cache["probs"]
    dfeat = np.zeros(cache["feat.shape"], dtype=np.float64)
    seeds = {kind: dlogits_by_head.get(kind) for kind in HEAD_ORDER}

    dpop = dlogits_by_head.get(LabelKind.POP)
    if dpop is not None:
        dpop_in = _head_conv_backward(net, cache, LabelKind.POP, dpop)
        dland_p, dbd_p, dfar_p, dfeat_slice = ops.concat_channels_backward(
            dpop_in, cache["pop.widths"])
        dfeat += dfeat_slice
        for kind, dprobs in zip(HEAD_ORDER, (dland_p, dbd_p, dfar_p)):
            extra = ops.softmax_channels_vjp(probs[kind], dprobs)
            seeds[kind] = extra if seeds[kind] is None else seeds[kind] + extra

    for kind in HEAD_ORDER:
        if seeds[kind] is not None:
            dfeat += _head_conv_backward(net, cache, kind, seeds[kind])

    dx = ops.avgpool2d_backward(dfeat, cache["avgpool"])

    for stage, pool_key in (("stage4", "stage3.pool"), ("stage3", "stage2.pool")):
        da, db_ = ops.concat_channels_backward(dx, cache[f"{stage}.widths"])
        dx = None
        for branch, dbr in (("a", da), ("b", db_)):
            conv_cache, mask = cache[f"{stage}.{branch}"]
            dz = ops.relu_backward(dbr, mask)
            dxi, dw, dbias = ops.conv2d_backward(dz, conv_cache)
            _accumulate(net.param(f"{stage}.{branch}.weight"), dw)
            _accumulate(net.param(f"{stage}.{branch}.bias"), dbias)
            dx = dxi if dx is None else dx + dxi
        dx = ops.maxpool2d_backward(dx, cache[pool_key],
                                    cache[pool_key + ".in"])

    for stage, first in (("stage2", False), ("stage1", True)):
        conv_cache, mask = cache[f"{stage}.conv"]
        dz = ops.relu_backward(dx, mask)
        dxi, dw, dbias = ops.conv2d_backward(dz, conv_cache, need_dx=not first)
        _accumulate(net.param(f"{stage}.conv.weight"), dw)
        _accumulate(net.param(f"{stage}.conv.bias"), dbias)
        if not first:
            dx = ops.maxpool2d_backward(dxi, cache["stage1.pool"],
                                        cache["stage1.pool.in"])
    return None


def shape_trace(net, height=TILE_PIXELS, width=TILE_PIXELS):
    """Spatial extents after each stage for a given input size."""
    trace = [(height, width)]

    def conv(hw, k, pad):
        return (ops.out_extent(hw[0], k, 1, pad), ops.out_extent(hw[1], k, 1, pad))

    def pool(hw, r, s):
        return (ops.out_extent(hw[0], r, s), ops.out_extent(hw[1], r, s))

    hw = conv(trace[-1], 5, 0); trace.append(hw)
    hw = pool(hw, 7, 4); trace.append(hw)
    hw = conv(hw, 3, 0); trace.append(hw)
    hw = pool(hw, 3, 2); trace.append(hw)
    hw = conv(hw, 3, 1); trace.append(hw)   # branch extent (1x1 identical)
    hw = pool(hw, 3, 2); trace.append(hw)
    hw = conv(hw, 3, 1); trace.append(hw)
    hw = pool(hw, 10, 1); trace.append(hw)
    return trace
