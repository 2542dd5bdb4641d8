"""Bit-identity between the compiled kernel core and the numpy fallback."""

import numpy as np
import pytest

from urbangrid.numerics import kernels


def _core_or_skip():
    try:
        return kernels.load("c")
    except ImportError:
        pytest.skip("compiled kernel core not built")


_fallback = kernels.load("python")


def test_active_backend_known():
    assert kernels.BACKEND in ("c", "python")


def test_load_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.load("fortran")


@pytest.mark.parametrize("shape,k,pad", [
    ((10, 10, 3), 5, 0),
    ((9, 7, 4), 3, 1),
    ((6, 6, 2), 1, 0),
    ((200, 200, 3), 5, 0),
])
def test_im2col_bitwise(rng, shape, k, pad):
    core = _core_or_skip()
    x = np.ascontiguousarray(rng.normal(size=shape))
    a = core.im2col(x, k, pad)
    b = _fallback.im2col(x, k, pad)
    assert a.shape == b.shape
    assert np.array_equal(a, b)


@pytest.mark.parametrize("shape,k,pad", [
    ((10, 10, 3), 5, 0),
    ((9, 7, 4), 3, 1),
    ((22, 22, 128), 3, 1),
])
def test_col2im_bitwise(rng, shape, k, pad):
    core = _core_or_skip()
    h, w, c = shape
    ho = h + 2 * pad - k + 1
    wo = w + 2 * pad - k + 1
    cols = np.ascontiguousarray(rng.normal(size=(ho * wo, k * k * c)))
    a = core.col2im(cols, h, w, c, k, pad)
    b = _fallback.col2im(cols, h, w, c, k, pad)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("shape,region,stride", [
    ((196, 196, 8), 7, 4),
    ((48, 48, 16), 3, 2),
    ((7, 9, 3), 3, 2),
])
def test_maxpool_bitwise(rng, shape, region, stride):
    core = _core_or_skip()
    x = np.ascontiguousarray(rng.normal(size=shape))
    oa, aa = core.maxpool_forward(x, region, stride)
    ob, ab = _fallback.maxpool_forward(x, region, stride)
    assert np.array_equal(oa, ob)
    assert np.array_equal(aa, ab)
    dout = np.ascontiguousarray(rng.normal(size=oa.shape))
    da = core.maxpool_backward(dout, aa, *shape)
    db = _fallback.maxpool_backward(dout, ab, *shape)
    assert np.array_equal(da, db)


def test_maxpool_tie_breaking_matches(rng):
    core = _core_or_skip()
    # Quantised values force many exact ties inside windows.
    x = np.ascontiguousarray(
        np.round(rng.normal(size=(17, 17, 4)) * 2.0) / 2.0)
    _, aa = core.maxpool_forward(x, 3, 2)
    _, ab = _fallback.maxpool_forward(x, 3, 2)
    assert np.array_equal(aa, ab)


def test_full_network_step_bitwise(rng):
    """One forward/backward through the real network on both backends."""
    core = _core_or_skip()
    from urbangrid.net import model
    from urbangrid.net.config import Sample
    from urbangrid.taxonomy import LabelKind

    tile = np.ascontiguousarray(rng.normal(size=(200, 200, 3)))
    sample = Sample(tile=tile, label_type=LabelKind.LAND, label=3)

    outputs = {}
    for name, mod in (("c", core), ("python", _fallback)):
        saved = (kernels.im2col, kernels.col2im,
                 kernels.maxpool_forward, kernels.maxpool_backward)
        kernels.im2col = mod.im2col
        kernels.col2im = mod.col2im
        kernels.maxpool_forward = mod.maxpool_forward
        kernels.maxpool_backward = mod.maxpool_backward
        try:
            net = model.build_network(seed=11)
            net.norm_mean = np.zeros(3)
            net.norm_std = np.ones(3)
            heads, _ = model.forward(net, tile)
            from urbangrid.net.loss import batch_step
            loss = batch_step(net, [sample], stage=1)
            grads = {n: p.grad.copy() for n, p in net.params.items()}
            outputs[name] = (heads.land.copy(), loss, grads)
        finally:
            (kernels.im2col, kernels.col2im,
             kernels.maxpool_forward, kernels.maxpool_backward) = saved

    la, lb = outputs["c"][0], outputs["python"][0]
    assert np.array_equal(la, lb)
    assert outputs["c"][1] == outputs["python"][1]
    for nm in outputs["c"][2]:
        assert np.array_equal(outputs["c"][2][nm], outputs["python"][2][nm]), nm
