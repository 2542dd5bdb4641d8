"""Dense tensor kernels with forward and adjoint passes, plus SGD.

All computation is 64-bit; operations are pure functions of their inputs
(only ``sgd_step`` mutates, and only the parameters it is given), with
fixed reduction orders so results are bit-reproducible.
"""

from .gradcheck import grad_check, run_op_checks
from .kernels import BACKEND
from .ops import (avgpool2d, avgpool2d_backward, concat_channels,
                  concat_channels_backward, conv2d, conv2d_backward,
                  cross_entropy, maxpool2d, maxpool2d_backward, out_extent,
                  relu, relu_backward, softmax_channels,
                  softmax_channels_vjp, softmax_cross_entropy_grad)
from .sgd import sgd_step
from .tensor import OptimizerConfig, Parameter, as_tensor

__all__ = [
    "BACKEND", "OptimizerConfig", "Parameter", "as_tensor",
    "avgpool2d", "avgpool2d_backward", "concat_channels",
    "concat_channels_backward", "conv2d", "conv2d_backward",
    "cross_entropy", "grad_check", "maxpool2d", "maxpool2d_backward",
    "out_extent", "relu", "relu_backward", "run_op_checks", "sgd_step",
    "softmax_channels", "softmax_channels_vjp",
    "softmax_cross_entropy_grad",
]
