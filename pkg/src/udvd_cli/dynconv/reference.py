"""Literal nested-loop transcription of dynamic convolution, used as an oracle."""

import numpy as np

from ..errors import ShapeError
from ..tensor import Tensor
from .layout import PerPixelKernels


def dynamic_conv_reference(
    x: Tensor, kernels: Tensor, r: int = 1, channel_shared: bool = True
) -> Tensor:
    """Evaluate the per-pixel sum one output sample at a time."""
    n, c, h, w = x.shape
    if kernels.ndim != 4 or kernels.shape[0] != n or kernels.shape[2:] != (h, w):
        raise ShapeError(f"kernels {kernels.shape} do not match input {x.shape}")
    layout = PerPixelKernels.infer(kernels, c, r=r, channel_shared=channel_shared)
    k, d = layout.k, layout.k // 2
    xin = x.data
    kv = kernels.data
    out = np.zeros((n, c, h * r, w * r), dtype=np.float64)

    for b in range(n):
        for ch in range(c):
            for i in range(h):
                for j in range(w):
                    for sx in range(r):
                        for sy in range(r):
                            acc = 0.0
                            for u in range(-d, d + 1):
                                for v in range(-d, d + 1):
                                    ii, jj = i - u, j - v
                                    if not (0 <= ii < h and 0 <= jj < w):
                                        continue
                                    tap = (u + d) * k + (v + d)
                                    if r > 1:
                                        channel = (sx * r + sy) * k * k + tap
                                    elif channel_shared:
                                        channel = tap
                                    else:
                                        channel = ch * k * k + tap
                                    acc += float(kv[b, channel, i, j]) * float(xin[b, ch, ii, jj])
                            out[b, ch, i * r + sx, j * r + sy] = acc
    return Tensor(out, dtype=np.result_type(x.dtype, kernels.dtype))
