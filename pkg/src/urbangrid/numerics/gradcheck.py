"""Finite-difference verification of the hand-written adjoints.

The harness reduces an operation's output to a scalar J = sum(R * op(x))
with a fixed random weighting R, then compares central differences of J
against the adjoint evaluated with upstream gradient R.  The reported
figure is the max relative error

    max_i |g_adj - g_fd| / max(1e-8, |g_adj| + |g_fd|).

Inputs for the kinked ops (ReLU, max-pool) are sampled away from their
tie points so the subgradient choice cannot contaminate the check.
"""

import numpy as np

from . import ops

DEFAULT_EPSILON = 1e-5


def grad_check(value_fn, grad, x, epsilon=DEFAULT_EPSILON, indices=None):
    """Max relative error between `grad` and central differences of `value_fn`.

    `value_fn` maps an array like `x` to a scalar; `grad` is the adjoint
    result for the same point.  `indices` restricts the check to a subset
    of flat indices (used for the expensive end-to-end checks).
    """
    flat = x.reshape(-1)
    gflat = np.asarray(grad).reshape(-1)
    if indices is None:
        indices = range(flat.size)
    worst = 0.0
    for i in indices:
        orig = flat[i]
        flat[i] = orig + epsilon
        jp = value_fn(x)
        flat[i] = orig - epsilon
        jm = value_fn(x)
        flat[i] = orig
        fd = (jp - jm) / (2.0 * epsilon)
        ga = gflat[i]
        err = abs(ga - fd) / max(1e-8, abs(ga) + abs(fd))
        worst = max(worst, err)
    return worst


def _spread(rng, shape, low=-1.0, high=1.0):
    """Distinct, well-separated values: a shuffled linspace."""
    n = int(np.prod(shape))
    vals = np.linspace(low, high, n)
    return rng.permutation(vals).reshape(shape)


def check_conv2d(seed=0, padding=0, epsilon=DEFAULT_EPSILON):
    """Check conv2d adjoints w.r.t. input, weights and bias; returns max error."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((8, 8, 2))
    w = rng.standard_normal((4, 3, 3, 2)) * 0.5
    b = rng.standard_normal(4) * 0.1
    y0, _ = ops.conv2d(x, w, b, padding)
    r = rng.standard_normal(y0.shape)

    def value(xv, wv, bv):
        y, _ = ops.conv2d(xv, wv, bv, padding)
        return float(np.sum(r * y))

    _, cache = ops.conv2d(x, w, b, padding)
    dx, dw, db = ops.conv2d_backward(r, cache)
    errs = [
        grad_check(lambda v: value(v, w, b), dx, x, epsilon),
        grad_check(lambda v: value(x, v, b), dw, w, epsilon),
        grad_check(lambda v: value(x, w, v), db, b, epsilon),
    ]
    return max(errs)


def check_maxpool(seed=0, region=3, stride=2, epsilon=DEFAULT_EPSILON):
    rng = np.random.default_rng(seed)
    x = _spread(rng, (7, 7, 2))   # distinct values, gaps >> epsilon
    r = rng.standard_normal(((7 - region) // stride + 1,
                             (7 - region) // stride + 1, 2))

    def value(xv):
        y, _ = ops.maxpool2d(xv, region, stride)
        return float(np.sum(r * y))

    _, arg = ops.maxpool2d(x, region, stride)
    dx = ops.maxpool2d_backward(r, arg, x.shape)
    return grad_check(value, dx, x, epsilon)


def check_avgpool(seed=0, region=3, stride=2, epsilon=DEFAULT_EPSILON):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((7, 7, 2))
    ho = (7 - region) // stride + 1
    r = rng.standard_normal((ho, ho, 2))

    def value(xv):
        y, _ = ops.avgpool2d(xv, region, stride)
        return float(np.sum(r * y))

    _, cache = ops.avgpool2d(x, region, stride)
    dx = ops.avgpool2d_backward(r, cache)
    return grad_check(value, dx, x, epsilon)


def check_relu(seed=0, epsilon=DEFAULT_EPSILON):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((6, 6, 3))
    x = np.where(np.abs(x) < 10 * epsilon, 0.5, x)   # keep clear of the kink
    r = rng.standard_normal(x.shape)

    def value(xv):
        y, _ = ops.relu(xv)
        return float(np.sum(r * y))

    _, mask = ops.relu(x)
    dx = ops.relu_backward(r, mask)
    return grad_check(value, dx, x, epsilon)


def check_concat(seed=0, epsilon=DEFAULT_EPSILON):
    rng = np.random.default_rng(seed)
    xs = [rng.standard_normal((4, 4, c)) for c in (2, 3, 1)]
    y0, widths = ops.concat_channels(xs)
    r = rng.standard_normal(y0.shape)
    grads = ops.concat_channels_backward(r, widths)

    worst = 0.0
    for i, (x, g) in enumerate(zip(xs, grads)):
        def value(xv, i=i):
            parts = list(xs)
            parts[i] = xv
            y, _ = ops.concat_channels(parts)
            return float(np.sum(r * y))
        worst = max(worst, grad_check(value, g, x, epsilon))
    return worst


def check_softmax_cross_entropy(seed=0, classes=13, epsilon=DEFAULT_EPSILON):
    """Composite softmax -> cross-entropy, adjoint p - y w.r.t. the logits."""
    rng = np.random.default_rng(seed)
    logits = rng.standard_normal((1, 1, classes))
    target = int(rng.integers(classes))

    def value(lv):
        return float(ops.cross_entropy(ops.softmax_channels(lv), target))

    probs = ops.softmax_channels(logits)
    g = ops.softmax_cross_entropy_grad(probs, target)
    return grad_check(value, g, logits, epsilon)


OP_CHECKS = {
    "conv2d_pad0": lambda seed: check_conv2d(seed, padding=0),
    "conv2d_pad1": lambda seed: check_conv2d(seed, padding=1),
    "maxpool2d": check_maxpool,
    "avgpool2d": check_avgpool,
    "relu": check_relu,
    "concat_channels": check_concat,
    "softmax_cross_entropy": check_softmax_cross_entropy,
}


def run_op_checks(seed=0):
    """Run every per-op adjoint check; returns {name: max relative error}."""
    return {name: fn(seed) for name, fn in OP_CHECKS.items()}
