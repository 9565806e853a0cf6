"""Optimized numpy kernels for per-pixel dynamic convolution.

The loops run over the k*k window offsets only; each iteration is one
contiguous, vectorized multiply-add over every pixel and channel, so the
reduction over taps is the innermost logical loop while memory is read in
slabs.
"""

from typing import Tuple

import numpy as np

from ..tensor.ops import pad_hw


def _kernel_view(kernels: np.ndarray, c: int, k: int, shared: bool) -> np.ndarray:
    n, _, h, w = kernels.shape
    return kernels.reshape(n, 1 if shared else c, k * k, h, w)


def dynamic_conv_forward(
    x: np.ndarray, kernels: np.ndarray, k: int, shared: bool = True
) -> np.ndarray:
    """out(i, j) = sum_{u,v} K_ij(u, v) * x(i - u, j - v), zero padded."""
    n, c, h, w = x.shape
    d = k // 2
    padded = pad_hw(x, d)
    kv = _kernel_view(kernels, c, k, shared)
    out = np.zeros((n, c, h, w), dtype=np.result_type(x, kernels))
    for a in range(k):
        for b in range(k):
            # padded offset (a, b) reads x(i - u, j - v) with u = d - a, v = d - b
            tap = (k - 1 - a) * k + (k - 1 - b)
            out += kv[:, :, tap] * padded[:, :, a : a + h, b : b + w]
    return out


def dynamic_conv_backward(
    upstream: np.ndarray, x: np.ndarray, kernels: np.ndarray, k: int, shared: bool = True
) -> Tuple[np.ndarray, np.ndarray]:
    """Adjoint of :func:`dynamic_conv_forward`; returns (grad_input, grad_kernels)."""
    n, c, h, w = x.shape
    d = k // 2
    dtype = np.result_type(x, kernels, upstream)
    padded = pad_hw(x, d)
    kv = _kernel_view(kernels, c, k, shared)
    grad_kernels = np.zeros(kv.shape, dtype=dtype)
    grad_padded = np.zeros(padded.shape, dtype=dtype)
    for a in range(k):
        for b in range(k):
            tap = (k - 1 - a) * k + (k - 1 - b)
            window = padded[:, :, a : a + h, b : b + w]
            contrib = upstream * window
            if shared:
                grad_kernels[:, 0, tap] = contrib.sum(axis=1)
            else:
                grad_kernels[:, :, tap] = contrib
            grad_padded[:, :, a : a + h, b : b + w] += kv[:, :, tap] * upstream
    grad_x = np.ascontiguousarray(grad_padded[:, :, d : d + h, d : d + w])
    return grad_x, grad_kernels.reshape(kernels.shape)


def dynamic_conv_upsample_forward(x: np.ndarray, kernels: np.ndarray, k: int, r: int) -> np.ndarray:
    """out(i*r + x, j*r + y) = sum_{u,v} K_ijxy(u, v) * in(i - u, j - v)."""
    n, c, h, w = x.shape
    sub = kernels.reshape(n, r, r, k * k, h, w)
    out = np.zeros((n, c, h * r, w * r), dtype=np.result_type(x, kernels))
    for sx in range(r):
        for sy in range(r):
            out[:, :, sx::r, sy::r] = dynamic_conv_forward(x, sub[:, sx, sy], k, shared=True)
    return out


def dynamic_conv_upsample_backward(
    upstream: np.ndarray, x: np.ndarray, kernels: np.ndarray, k: int, r: int
) -> Tuple[np.ndarray, np.ndarray]:
    n, c, h, w = x.shape
    sub = kernels.reshape(n, r, r, k * k, h, w)
    dtype = np.result_type(x, kernels, upstream)
    grad_x = np.zeros(x.shape, dtype=dtype)
    grad_kernels = np.zeros(sub.shape, dtype=dtype)
    for sx in range(r):
        for sy in range(r):
            g = np.ascontiguousarray(upstream[:, :, sx::r, sy::r])
            gx, gk = dynamic_conv_backward(g, x, sub[:, sx, sy], k, shared=True)
            grad_x += gx
            grad_kernels[:, sx, sy] = gk
    return grad_x, grad_kernels.reshape(kernels.shape)
