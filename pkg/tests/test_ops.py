"""Forward-value checks for the low-level ops against naive loop oracles."""

import numpy as np
import pytest

from urbangrid.errors import ShapeError
from urbangrid.numerics import ops

import oracles


def test_out_extent_formula():
    assert ops.out_extent(200, 5) == 196
    assert ops.out_extent(196, 7, stride=4) == 48
    assert ops.out_extent(48, 3, pad=1) == 48
    assert ops.out_extent(10, 10, stride=1) == 1
    assert ops.out_extent(216, 5) == 212


def test_conv_all_ones_kernel():
    # 3x3 kernel of ones over a 5x5 field of ones: every output is 9.
    x = np.ones((5, 5, 1))
    w = np.ones((1, 3, 3, 1))
    b = np.zeros(1)
    out, _ = ops.conv2d(x, w, b)
    assert out.shape == (3, 3, 1)
    assert np.all(out == 9.0)


@pytest.mark.parametrize("padding", [0, 1, 2])
def test_conv_matches_naive(rng, padding):
    x = rng.normal(size=(9, 8, 3))
    w = rng.normal(size=(4, 3, 3, 3))
    b = rng.normal(size=4)
    out, _ = ops.conv2d(x, w, b, padding=padding)
    ref = oracles.conv2d_naive(x, np.transpose(w, (1, 2, 3, 0)), b, padding=padding)
    assert out.shape == ref.shape
    np.testing.assert_allclose(out, ref, rtol=1e-12, atol=1e-12)


def test_conv_linearity(rng):
    x1 = rng.normal(size=(6, 6, 2))
    x2 = rng.normal(size=(6, 6, 2))
    w = rng.normal(size=(3, 3, 3, 2))
    b = np.zeros(3)
    lhs, _ = ops.conv2d(2.0 * x1 - 0.5 * x2, w, b)
    y1, _ = ops.conv2d(x1, w, b)
    y2, _ = ops.conv2d(x2, w, b)
    np.testing.assert_allclose(lhs, 2.0 * y1 - 0.5 * y2, rtol=1e-10, atol=1e-12)


def test_conv_rejects_bad_shapes(rng):
    x = rng.normal(size=(5, 5, 3))
    with pytest.raises(ShapeError):
        ops.conv2d(x, rng.normal(size=(2, 3, 4, 3)), np.zeros(2))
    with pytest.raises(ShapeError):
        ops.conv2d(x, rng.normal(size=(2, 3, 3, 4)), np.zeros(2))
    with pytest.raises(ShapeError):
        ops.conv2d(x, rng.normal(size=(2, 7, 7, 3)), np.zeros(2))


def test_maxpool_matches_naive(rng):
    x = rng.normal(size=(11, 13, 5))
    out, _ = ops.maxpool2d(x, 3, 2)
    ref = oracles.maxpool_naive(x, 3, 2)
    assert out.shape == ref.shape
    np.testing.assert_array_equal(out, ref)


def test_maxpool_tie_routes_to_first(rng):
    # Two equal maxima in one window: the gradient must go to the
    # first one in row-major scan order, and only there.
    x = np.zeros((3, 3, 1))
    x[0, 1, 0] = 5.0
    x[2, 0, 0] = 5.0
    out, arg = ops.maxpool2d(x, 3, 1)
    assert out[0, 0, 0] == 5.0
    dx = ops.maxpool2d_backward(np.ones((1, 1, 1)), arg, x.shape)
    assert dx[0, 1, 0] == 1.0
    assert dx[2, 0, 0] == 0.0
    assert dx.sum() == 1.0


def test_maxpool_overlapping_windows_accumulate(rng):
    x = rng.normal(size=(5, 5, 2))
    out, arg = ops.maxpool2d(x, 3, 1)
    dout = np.ones_like(out)
    dx = ops.maxpool2d_backward(dout, arg, x.shape)
    # Every window contributes exactly one unit of gradient.
    assert dx.sum() == pytest.approx(out.shape[0] * out.shape[1] * out.shape[2])


def test_maxpool_region_too_large():
    with pytest.raises(ShapeError):
        ops.maxpool2d(np.zeros((4, 4, 1)), 5, 1)


def test_avgpool_matches_naive(rng):
    x = rng.normal(size=(12, 10, 4))
    out, _ = ops.avgpool2d(x, 3, 2)
    ref = oracles.avgpool_naive(x, 3, 2)
    np.testing.assert_allclose(out, ref, rtol=1e-12, atol=1e-12)


def test_avgpool_global_window(rng):
    x = rng.normal(size=(10, 10, 128))
    out, _ = ops.avgpool2d(x, 10, 1)
    assert out.shape == (1, 1, 128)
    np.testing.assert_allclose(out[0, 0], x.mean(axis=(0, 1)), rtol=1e-12)


def test_avgpool_backward_uniform_spread(rng):
    x = rng.normal(size=(6, 6, 1))
    out, cache = ops.avgpool2d(x, 3, 3)
    dx = ops.avgpool2d_backward(np.ones_like(out), cache)
    np.testing.assert_allclose(dx, np.full((6, 6, 1), 1.0 / 9.0), rtol=1e-15)


def test_concat_roundtrip(rng):
    a = rng.normal(size=(4, 4, 3))
    b = rng.normal(size=(4, 4, 5))
    out, widths = ops.concat_channels([a, b])
    assert out.shape == (4, 4, 8)
    assert widths == [3, 5]
    da, db = ops.concat_channels_backward(out, widths)
    np.testing.assert_array_equal(da, a)
    np.testing.assert_array_equal(db, b)


def test_concat_rejects_spatial_mismatch(rng):
    with pytest.raises(ShapeError):
        ops.concat_channels([np.zeros((4, 4, 1)), np.zeros((5, 4, 1))])


def test_relu_values_and_grad():
    x = np.array([[[-2.0, 0.0, 3.0]]])
    out, cache = ops.relu(x)
    np.testing.assert_array_equal(out, [[[0.0, 0.0, 3.0]]])
    dx = ops.relu_backward(np.ones_like(x), cache)
    # Subgradient 0 at exactly 0.
    np.testing.assert_array_equal(dx, [[[0.0, 0.0, 1.0]]])


def test_softmax_two_class_example():
    x = np.array([[[0.0, np.log(3.0)]]])
    p = ops.softmax_channels(x)
    np.testing.assert_allclose(p, [[[0.25, 0.75]]], rtol=1e-12)


def test_softmax_shift_invariance_and_normalisation(rng):
    x = rng.normal(size=(3, 3, 7)) * 50.0
    p = ops.softmax_channels(x)
    np.testing.assert_allclose(p.sum(axis=2), np.ones((3, 3)), rtol=1e-12)
    assert np.all(p >= 0.0)
    p2 = ops.softmax_channels(x + 123.0)
    np.testing.assert_allclose(p, p2, rtol=1e-10)


def test_softmax_extreme_logits_finite():
    x = np.array([[[-1e4, 0.0, 1e4]]])
    p = ops.softmax_channels(x)
    assert np.all(np.isfinite(p))
    np.testing.assert_allclose(p[0, 0, 2], 1.0)


def test_cross_entropy_uniform_13():
    p = np.full((1, 1, 13), 1.0 / 13.0)
    assert ops.cross_entropy(p, 4) == pytest.approx(np.log(13.0), rel=1e-12)


def test_cross_entropy_floor():
    p = np.zeros((1, 1, 3))
    p[0, 0, 0] = 1.0
    val = ops.cross_entropy(p, 2)
    assert np.isfinite(val)
    assert val == pytest.approx(-np.log(ops.PROB_FLOOR))


def test_cross_entropy_target_range():
    p = np.full((1, 1, 4), 0.25)
    with pytest.raises(ShapeError):
        ops.cross_entropy(p, 4)
    with pytest.raises(ShapeError):
        ops.cross_entropy(p, -1)


def test_fused_softmax_ce_grad(rng):
    logits = rng.normal(size=(1, 1, 13))
    p = ops.softmax_channels(logits)
    g = ops.softmax_cross_entropy_grad(p, 5)
    expected = p.copy()
    expected[0, 0, 5] -= 1.0
    np.testing.assert_array_equal(g, expected)
    # Fused grad agrees with chaining the softmax VJP through -log p[y].
    dprobs = np.zeros_like(p)
    dprobs[0, 0, 5] = -1.0 / p[0, 0, 5]
    chained = ops.softmax_channels_vjp(p, dprobs)
    np.testing.assert_allclose(g, chained, rtol=1e-10, atol=1e-12)
