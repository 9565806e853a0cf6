"""Bicubic resizing compatible with the usual SR evaluation resizer.

Separable cubic convolution with a = -0.5; on downscale with antialiasing the
kernel is stretched by 1/scale. Out-of-range taps are clamped to the edge.
"""

from functools import lru_cache

import numpy as np

from ..errors import ShapeError
from ..tensor import Tensor

CUBIC_A = -0.5


def cubic(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    ax2, ax3 = ax * ax, ax * ax * ax
    a = CUBIC_A
    near = (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0
    far = a * ax3 - 5.0 * a * ax2 + 8.0 * a * ax - 4.0 * a
    return np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))


@lru_cache(maxsize=128)
def resize_matrix(in_len: int, out_len: int, antialias: bool = True) -> np.ndarray:
    """Dense (out_len, in_len) interpolation matrix for one axis."""
    scale = out_len / in_len
    width = 4.0
    if scale < 1.0 and antialias:
        width = width / scale

        def kernel(x: np.ndarray) -> np.ndarray:
            return scale * cubic(scale * x)
    else:
        kernel = cubic

    # 1-based output coordinates mapped back onto the input grid
    out_coords = np.arange(1, out_len + 1, dtype=np.float64)
    centers = out_coords / scale + 0.5 * (1.0 - 1.0 / scale)
    left = np.floor(centers - width / 2.0)
    taps = int(np.ceil(width)) + 2
    indices = left[:, None] + np.arange(taps, dtype=np.float64)[None, :]
    weights = kernel(centers[:, None] - indices)
    weights = weights / weights.sum(axis=1, keepdims=True)
    columns = np.clip(indices, 1, in_len).astype(np.int64) - 1

    matrix = np.zeros((out_len, in_len), dtype=np.float64)
    rows = np.repeat(np.arange(out_len), taps)
    np.add.at(matrix, (rows, columns.reshape(-1)), weights.reshape(-1))
    matrix.setflags(write=False)
    return matrix


def bicubic_resize(img: Tensor, out_h: int, out_w: int, antialias: bool = True) -> Tensor:
    """Resize the two trailing axes of an NCHW tensor."""
    if img.ndim != 4:
        raise ShapeError(f"bicubic_resize expects NCHW, got {img.shape}")
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"output size must be at least 1x1, got {out_h}x{out_w}")
    h, w = img.shape[2:]
    if (out_h, out_w) == (h, w):
        return Tensor(img.data, dtype=img.dtype)
    arr = img.data.astype(np.float64)
    if out_h != h:
        arr = np.matmul(resize_matrix(h, out_h, antialias), arr)
    if out_w != w:
        arr = np.matmul(arr, resize_matrix(w, out_w, antialias).T)
    return Tensor(arr, dtype=img.dtype)


def bicubic_upsample(img: Tensor, scale: int) -> Tensor:
    h, w = img.shape[2:]
    return bicubic_resize(img, h * scale, w * scale, antialias=False)
