"""Graph-recording dynamic convolution ops."""

import numpy as np

from ..errors import ShapeError
from ..tensor import Tensor
from ..tensor.tensor import record
from . import functional as F
from .layout import PerPixelKernels


def _check_spatial(x: Tensor, kernels: Tensor) -> None:
    if x.ndim != 4 or kernels.ndim != 4:
        raise ShapeError(f"expected 4-D input and kernels, got {x.shape} and {kernels.shape}")
    if x.shape[0] != kernels.shape[0] or x.shape[2:] != kernels.shape[2:]:
        raise ShapeError(
            f"kernels {kernels.shape} do not match input {x.shape} in batch or spatial dims"
        )


def dynamic_conv(x: Tensor, kernels: Tensor, channel_shared: bool = True) -> Tensor:
    """Per-pixel dynamic convolution keeping the resolution (r = 1)."""
    _check_spatial(x, kernels)
    layout = PerPixelKernels.infer(kernels, x.shape[1], r=1, channel_shared=channel_shared)
    k = layout.k
    dtype = np.result_type(x.dtype, kernels.dtype)
    xd = x.data.astype(dtype, copy=False)
    kd = kernels.data.astype(dtype, copy=False)
    out = Tensor.wrap(F.dynamic_conv_forward(xd, kd, k, channel_shared))

    def backward(g: np.ndarray):
        return F.dynamic_conv_backward(g, xd, kd, k, channel_shared)

    return record("dynamic_conv", (x, kernels), out, backward, k=k, shared=channel_shared)


def dynamic_conv_upsample(x: Tensor, kernels: Tensor, r: int) -> Tensor:
    """Per-pixel dynamic convolution producing an r x r block per input pixel."""
    _check_spatial(x, kernels)
    layout = PerPixelKernels.infer(kernels, x.shape[1], r=r, channel_shared=True)
    k = layout.k
    dtype = np.result_type(x.dtype, kernels.dtype)
    xd = x.data.astype(dtype, copy=False)
    kd = kernels.data.astype(dtype, copy=False)
    out = Tensor.wrap(F.dynamic_conv_upsample_forward(xd, kd, k, r))

    def backward(g: np.ndarray):
        return F.dynamic_conv_upsample_backward(g, xd, kd, k, r)

    return record("dynamic_conv_upsample", (x, kernels), out, backward, k=k, r=r)


def dynamic_conv_backward(
    upstream: Tensor, x: Tensor, kernels: Tensor, r: int = 1, channel_shared: bool = True
) -> tuple:
    """Analytic (grad_input, grad_kernels) for either form, outside any graph."""
    _check_spatial(x, kernels)
    layout = PerPixelKernels.infer(kernels, x.shape[1], r=r, channel_shared=channel_shared)
    n, c, h, w = x.shape
    if upstream.shape != (n, c, h * r, w * r):
        raise ShapeError(f"upstream {upstream.shape} does not match output {(n, c, h * r, w * r)}")
    if r > 1:
        gx, gk = F.dynamic_conv_upsample_backward(upstream.data, x.data, kernels.data, layout.k, r)
    else:
        gx, gk = F.dynamic_conv_backward(
            upstream.data, x.data, kernels.data, layout.k, channel_shared
        )
    return Tensor.wrap(gx), Tensor.wrap(gk)
