"""Core value types for the tensor kernels.

A "tensor" throughout this package is simply a C-contiguous float64
numpy array of shape (height, width, channels); no wrapper class is
used.  ``as_tensor`` normalizes/validates arbitrary input into that
convention.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError


def as_tensor(data, shape=None):
    """Coerce `data` to a C-contiguous float64 (H, W, C) array.

    2-D input is promoted to a single channel.  Raises ShapeError if the
    result is not rank 3 (or does not match `shape` when given).
    """
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    if arr.ndim != 3:
        raise ShapeError(f"expected a rank-3 tensor, got shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise ShapeError(f"expected shape {tuple(shape)}, got {arr.shape}")
    return arr


def check_finite(arr, context=""):
    """Raise if `arr` contains NaN/Inf; used in tests and debug paths."""
    if not np.all(np.isfinite(arr)):
        raise FloatingPointError(f"non-finite values{' in ' + context if context else ''}")
    return arr


@dataclass
class Parameter:
    """A named trainable array with gradient and momentum buffers.

    Convolution kernels are stored as (k, c, c, q): k filters of spatial
    size c x c over q input channels.  Biases are stored as (k,).
    `grad` and `velocity` always share `value`'s shape; `velocity` starts
    at zero.
    """

    name: str
    value: np.ndarray
    grad: np.ndarray = field(init=False)
    velocity: np.ndarray = field(init=False)
    is_bias: bool = False

    def __post_init__(self):
        self.value = np.ascontiguousarray(self.value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.velocity = np.zeros_like(self.value)

    @property
    def size(self):
        return self.value.size

    def zero_grad(self):
        self.grad[...] = 0.0


@dataclass(frozen=True)
class OptimizerConfig:
    """SGD-with-momentum settings; weight decay applies to kernels only."""

    learning_rate: float = 0.01
    momentum: float = 0.9
    weight_decay: float = 0.0005

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")
