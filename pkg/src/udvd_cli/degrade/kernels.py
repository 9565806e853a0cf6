"""Isotropic Gaussian blur kernels and edge-clamped blurring."""

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError, ShapeError
from ..tensor import Tensor

KERNEL_SIZE = 15


@dataclass(frozen=True)
class BlurKernel:
    """A normalized p x p blur kernel."""
    width: float
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def vector(self) -> np.ndarray:
        return self.weights.reshape(-1)


def gaussian_kernel(width: float, size: int = KERNEL_SIZE) -> BlurKernel:
    """entry(a, b) proportional to exp(-((a-c)^2 + (b-c)^2) / (2 width^2)), summing to 1."""
    if not width > 0:
        raise ParameterError(f"kernel width must be > 0, got {width}")
    if size < 1 or size % 2 == 0:
        raise ParameterError(f"kernel size must be a positive odd integer, got {size}")
    center = (size - 1) / 2.0
    axis = np.arange(size, dtype=np.float64) - center
    sq = axis[:, None] ** 2 + axis[None, :] ** 2
    weights = np.exp(-sq / (2.0 * width * width))
    weights /= weights.sum()
    weights.setflags(write=False)
    return BlurKernel(float(width), weights)


def blur(img: Tensor, kernel: BlurKernel) -> Tensor:
    """Per-channel 2-D convolution with replicate padding; same shape out."""
    if img.ndim != 4:
        raise ShapeError(f"blur expects NCHW, got {img.shape}")
    p = kernel.size
    half = p // 2
    n, c, h, w = img.shape
    pad = ((0, 0), (0, 0), (half, half), (half, half))
    padded = np.pad(img.data.astype(np.float64), pad, mode="edge")
    weights = kernel.weights
    out = np.zeros((n, c, h, w), dtype=np.float64)
    for a in range(p):
        for b in range(p):
            # true convolution: tap (a, b) reads img(i - (a - half), j - (b - half))
            top, left = p - 1 - a, p - 1 - b
            out += weights[a, b] * padded[:, :, top : top + h, left : left + w]
    return Tensor(out, dtype=img.dtype)
